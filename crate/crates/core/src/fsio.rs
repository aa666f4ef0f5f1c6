//! File helpers: atomic writes and reads with path-carrying errors.

use crate::error::{Error, Result};
use std::path::Path;

/// Writes `<path>.tmp`, then renames it to `path`.
pub fn write_atomic(path: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_to_string(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b/c.txt");
        write_atomic(&p, "hello").unwrap();
        write_atomic(&p, "world").unwrap();
        assert_eq!(read_to_string(&p).unwrap(), "world");
        assert!(!dir.path().join("a/b/c.txt.tmp").exists());
        assert!(matches!(read_to_string(dir.path().join("missing")), Err(Error::Io { .. })));
    }
}
