//! Directory layout of a saved ensemble:
//! `manifest.json`, one `<sub name>.json` per sub-network and `master.json`.

use super::EnsembleModel;
use crate::error::{Error, Result};
use crate::fsio::{read_to_string, write_atomic};
use crate::metrics::MetricsReport;
use crate::mlp::TrainedExpert;
use crate::timeseries::MonthRange;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const STORE_SCHEMA: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const MASTER_FILE: &str = "master.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    pub label: String,
    pub file: String,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: u32,
    pub target: String,
    pub train_range: MonthRange,
    pub test_range: MonthRange,
    pub cycle_period: usize,
    pub subs: Vec<ManifestEntry>,
    pub master: ManifestEntry,
    pub reports: Vec<(String, MetricsReport)>,
}

fn entry(e: &TrainedExpert, label: &str, file: String) -> ManifestEntry {
    ManifestEntry {
        name: e.name.clone(),
        label: label.to_string(),
        file,
        rng_seed: e.rng_seed,
    }
}

fn check_file_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(Error::Config(format!("`{name}` is not a plain file name")));
    }
    Ok(())
}

impl EnsembleModel {
    pub fn manifest(&self) -> Manifest {
        Manifest {
            schema: STORE_SCHEMA,
            target: self.target_name.clone(),
            train_range: self.train_range,
            test_range: self.test_range,
            cycle_period: self.cycle_period,
            subs: self
                .subs
                .iter()
                .zip(&self.labels)
                .map(|(e, l)| entry(e, l, format!("{}.json", e.name)))
                .collect(),
            master: entry(&self.master, super::MASTER_LABEL, MASTER_FILE.into()),
            reports: self.reports.clone(),
        }
    }

    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let manifest = self.manifest();
        for (e, m) in self.subs.iter().zip(&manifest.subs) {
            check_file_name(&m.file)?;
            write_atomic(dir.join(&m.file), e.to_json()?)?;
        }
        write_atomic(dir.join(MASTER_FILE), self.master.to_json()?)?;
        write_atomic(
            dir.join(MANIFEST_FILE),
            serde_json::to_string_pretty(&manifest)?,
        )
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest: Manifest = serde_json::from_str(&read_to_string(dir.join(MANIFEST_FILE))?)?;
        if manifest.schema != STORE_SCHEMA {
            return Err(Error::Config(format!(
                "unsupported model schema {} (expected {STORE_SCHEMA})",
                manifest.schema
            )));
        }
        let load = |m: &ManifestEntry| -> Result<TrainedExpert> {
            check_file_name(&m.file)?;
            TrainedExpert::from_json(&read_to_string(dir.join(&m.file))?)
        };
        let subs = manifest.subs.iter().map(load).collect::<Result<Vec<_>>>()?;
        let master = load(&manifest.master)?;
        Ok(EnsembleModel {
            target_name: manifest.target,
            train_range: manifest.train_range,
            test_range: manifest.test_range,
            cycle_period: manifest.cycle_period,
            labels: manifest.subs.into_iter().map(|m| m.label).collect(),
            subs,
            master,
            reports: manifest.reports,
        })
    }
}
