//! Error type shared by every module of the crate.

use crate::timeseries::MonthStamp;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("csv row {row}, column {column}: {message}")]
    Csv {
        row: u64,
        column: usize,
        message: String,
    },

    #[error("invalid month stamp `{0}` (expected YYYY-MM)")]
    MonthStamp(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series `{name}` is too short: need {needed} observations, have {have}")]
    TooShort {
        name: String,
        needed: usize,
        have: usize,
    },

    #[error("unknown series `{0}`")]
    UnknownSeries(String),

    #[error("series are misaligned: {0}")]
    Misaligned(String),

    #[error("feature `{feature}` lacks warm-up history: {short_by} month(s) short before {first_needed}")]
    InsufficientHistory {
        feature: String,
        short_by: i64,
        first_needed: MonthStamp,
    },

    #[error("log of non-positive ratio at {0}")]
    NonPositiveRatio(MonthStamp),

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("feature mismatch: {0}")]
    FeatureMismatch(String),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("sub-network {index} failed: {source}")]
    SubNetwork {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
