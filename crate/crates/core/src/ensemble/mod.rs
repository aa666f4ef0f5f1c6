//! Stacked ensemble: sub-networks trained on their own feature sets, and a
//! master network whose inputs are the sub-networks' predictions.

mod store;

pub use store::{Manifest, MANIFEST_FILE, MASTER_FILE, STORE_SCHEMA};

use crate::error::{Error, Result};
use crate::metrics::{report, MetricsReport};
use crate::mlp::{error_percent, predict, Activation, TrainConfig, TrainedExpert};
use crate::preprocess::{
    assemble, assemble_inputs, dominant_cycle, presets, FeatureMatrix, FeatureSpec,
    PresetFeature, Transform,
};
use crate::search::{candidate_seed, maximize_sharpe, train_shape, SharpeSearch};
use crate::timeseries::{MonthRange, SeriesMap, TimeSeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MASTER_LABEL: &str = "Master Network";

/// How restarts pick their winner when `restarts > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Validate on the last third of the training range, then retrain the
    /// winning seed on the whole training range.
    #[default]
    CarveOut,
    /// Validate on the test range itself. Leaks test data into model choice.
    Leaky,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubSpec {
    pub name: String,
    pub label: String,
    pub features: Vec<PresetFeature>,
    /// Hidden layer sizes; input and output widths are implied.
    pub hidden: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub subs: Vec<SubSpec>,
    pub sub_config: TrainConfig,
    pub master_hidden: Vec<usize>,
    pub master_config: TrainConfig,
    /// Seeds for sub `i` and the master are derived from this.
    pub seed: u64,
    pub restarts: usize,
    pub selection: Selection,
    /// Fixed cycle length; detected from the training-range target when absent.
    pub cycle_period: Option<usize>,
}

pub const DEFAULT_SUB_HIDDEN: usize = 4;
/// Epoch budget for sub-networks and master. The master is fitted on the
/// sub-networks' training-range outputs.
pub const DEFAULT_ENSEMBLE_EPOCHS: usize = 100;

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            subs: presets()
                .into_iter()
                .enumerate()
                .map(|(i, p)| SubSpec {
                    name: p.name,
                    label: format!("Network {}", i + 1),
                    features: p.features,
                    hidden: vec![DEFAULT_SUB_HIDDEN],
                })
                .collect(),
            sub_config: TrainConfig {
                max_epochs: DEFAULT_ENSEMBLE_EPOCHS,
                ..TrainConfig::default()
            },
            master_hidden: vec![4],
            master_config: TrainConfig {
                max_epochs: DEFAULT_ENSEMBLE_EPOCHS,
                ..TrainConfig::default()
            },
            seed: crate::mlp::DEFAULT_SEED,
            restarts: 1,
            selection: Selection::CarveOut,
            cycle_period: None,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.subs.len() < 2 {
            return Err(Error::Config("an ensemble needs at least two sub-networks".into()));
        }
        for (i, s) in self.subs.iter().enumerate() {
            if s.features.is_empty() {
                return Err(Error::Config(format!("sub-network `{}` has no features", s.name)));
            }
            if s.hidden.is_empty() || s.hidden.contains(&0) {
                return Err(Error::Config(format!(
                    "sub-network `{}` needs hidden layer sizes >= 1",
                    s.name
                )));
            }
            if self.subs[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::Config(format!("duplicate sub-network name `{}`", s.name)));
            }
        }
        if self.master_hidden.is_empty() || self.master_hidden.contains(&0) {
            return Err(Error::Config("master hidden layer sizes must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be >= 1".into()));
        }
        if self.cycle_period.is_some_and(|p| p < 2) {
            return Err(Error::Config("cycle_period must be >= 2".into()));
        }
        self.sub_config.validate()?;
        self.master_config.validate()
    }

    pub fn sub_seed(&self, index: usize) -> u64 {
        candidate_seed(&[index], self.seed)
    }

    pub fn master_seed(&self) -> u64 {
        candidate_seed(&[self.subs.len()], self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub target_name: String,
    pub train_range: MonthRange,
    pub test_range: MonthRange,
    pub cycle_period: usize,
    pub labels: Vec<String>,
    pub subs: Vec<TrainedExpert>,
    pub master: TrainedExpert,
    /// One row per sub-network in `subs` order, then the master.
    pub reports: Vec<(String, MetricsReport)>,
}

/// Trains one expert, optionally best-of-`restarts` by validation SRM.
fn fit(
    shape: &[usize],
    config: &TrainConfig,
    restarts: usize,
    selection: Selection,
    train_m: &FeatureMatrix,
    test_m: &FeatureMatrix,
) -> Result<TrainedExpert> {
    let (hidden, output) = (Activation::Logistic, Activation::Linear);
    if restarts <= 1 {
        return train_shape(shape, hidden, output, config, train_m);
    }
    let search = SharpeSearch {
        shape: shape.to_vec(),
        hidden_activation: hidden,
        output_activation: output,
        config: *config,
        target_srm: f64::INFINITY,
        max_restarts: restarts,
    };
    match selection {
        Selection::Leaky => Ok(maximize_sharpe(&search, train_m, test_m)?.expert),
        Selection::CarveOut => {
            let n = train_m.n_rows();
            let (fit_r, val_r) = train_m.range().split_at(n - n / 3)?;
            let outcome = maximize_sharpe(&search, &train_m.slice(fit_r)?, &train_m.slice(val_r)?)?;
            let winner = TrainConfig {
                rng_seed: outcome.expert.rng_seed,
                ..*config
            };
            train_shape(shape, hidden, output, &winner, train_m)
        }
    }
}

/// Dominant cycle of `target` from its first month through the end of
/// `train_range`.
pub fn detect_cycle(target: &TimeSeries, train_range: MonthRange) -> Result<usize> {
    let upto = MonthRange::new(target.start(), train_range.end)?;
    dominant_cycle(&target.slice(upto)?)
}

pub(crate) fn shape_for(n_in: usize, hidden: &[usize]) -> Vec<usize> {
    std::iter::once(n_in).chain(hidden.iter().copied()).chain([1]).collect()
}

fn prediction_map(
    subs: &[TrainedExpert],
    preds: impl IntoIterator<Item = TimeSeries>,
) -> SeriesMap {
    subs.iter().map(|e| e.name.clone()).zip(preds).collect()
}

fn master_features(subs: &[TrainedExpert]) -> Vec<FeatureSpec> {
    subs.iter().map(|e| FeatureSpec::raw(e.name.clone(), 0)).collect()
}

/// Trains every sub-network on `train_range`, then the master on the
/// sub-networks' training-range predictions, and reports all of them over
/// `test_range`. Test-range target values are read only for reporting.
pub fn train_ensemble(
    spec: &EnsembleSpec,
    sources: &SeriesMap,
    target_name: &str,
    train_range: MonthRange,
    test_range: MonthRange,
) -> Result<EnsembleModel> {
    spec.validate()?;
    if test_range.start <= train_range.end {
        return Err(Error::invalid(format!(
            "test range {test_range} must start after train range {train_range}"
        )));
    }
    let target = sources
        .get(target_name)
        .ok_or_else(|| Error::UnknownSeries(target_name.to_string()))?;
    let cycle_period = match spec.cycle_period {
        Some(p) => p,
        None => detect_cycle(target, train_range)?,
    };

    let trained: Vec<(TrainedExpert, FeatureMatrix, FeatureMatrix)> = spec
        .subs
        .par_iter()
        .enumerate()
        .map(|(i, sub)| {
            let wrap = |e: Error| Error::SubNetwork {
                index: i + 1,
                source: Box::new(e),
            };
            let features = crate::preprocess::NetworkPreset {
                name: sub.name.clone(),
                beta: None,
                features: sub.features.clone(),
            }
            .expand(cycle_period);
            let train_m = assemble(&features, sources, target_name, Transform::Identity, train_range)
                .map_err(wrap)?;
            let test_m = assemble(&features, sources, target_name, Transform::Identity, test_range)
                .map_err(wrap)?;
            let config = TrainConfig {
                rng_seed: spec.sub_seed(i),
                ..spec.sub_config
            };
            let mut expert = fit(
                &shape_for(features.len(), &sub.hidden),
                &config,
                spec.restarts,
                spec.selection,
                &train_m,
                &test_m,
            )
            .map_err(wrap)?;
            expert.name = sub.name.clone();
            expert.test_range = Some(test_range);
            Ok((expert, train_m, test_m))
        })
        .collect::<Result<_>>()?;

    let mut reports = Vec::with_capacity(trained.len() + 1);
    let mut train_preds = Vec::with_capacity(trained.len());
    let mut test_preds = Vec::with_capacity(trained.len());
    for ((expert, train_m, test_m), sub) in trained.iter().zip(&spec.subs) {
        reports.push((sub.label.clone(), report(expert, train_m, test_m, target)?));
        train_preds.push(predict(expert, train_m)?);
        test_preds.push(predict(expert, test_m)?);
    }
    let subs: Vec<TrainedExpert> = trained.into_iter().map(|(e, _, _)| e).collect();

    let mfeatures = master_features(&subs);
    let mut train_sources = prediction_map(&subs, train_preds);
    train_sources.insert(target_name.to_string(), target.clone());
    let master_train = assemble(&mfeatures, &train_sources, target_name, Transform::Identity, train_range)?;
    let mut test_sources = prediction_map(&subs, test_preds);
    test_sources.insert(target_name.to_string(), target.clone());
    let master_test = assemble(&mfeatures, &test_sources, target_name, Transform::Identity, test_range)?;

    let config = TrainConfig {
        rng_seed: spec.master_seed(),
        ..spec.master_config
    };
    let mut master = fit(
        &shape_for(subs.len(), &spec.master_hidden),
        &config,
        spec.restarts,
        spec.selection,
        &master_train,
        &master_test,
    )?;
    master.name = "master".into();
    master.test_range = Some(test_range);
    reports.push((
        MASTER_LABEL.to_string(),
        report(&master, &master_train, &master_test, target)?,
    ));

    Ok(EnsembleModel {
        target_name: target_name.to_string(),
        train_range,
        test_range,
        cycle_period,
        labels: spec.subs.iter().map(|s| s.label.clone()).collect(),
        subs,
        master,
        reports,
    })
}

impl EnsembleModel {
    /// Sub-network prediction columns over `range`, in sub order.
    pub fn sub_predictions(&self, sources: &SeriesMap, range: MonthRange) -> Result<SeriesMap> {
        let preds = self
            .subs
            .iter()
            .enumerate()
            .map(|(i, e)| {
                assemble_inputs(&e.features, sources, range)
                    .and_then(|m| predict(e, &m))
                    .map_err(|err| Error::SubNetwork {
                        index: i + 1,
                        source: Box::new(err),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(prediction_map(&self.subs, preds))
    }

    /// The master's input matrix over `range` (no target column).
    pub fn master_inputs(&self, sources: &SeriesMap, range: MonthRange) -> Result<FeatureMatrix> {
        let preds = self.sub_predictions(sources, range)?;
        assemble_inputs(&master_features(&self.subs), &preds, range)
    }

    /// Recomputes the report rows (subs in order, then the master) from data.
    pub fn evaluate(&self, sources: &SeriesMap) -> Result<Vec<(String, MetricsReport)>> {
        let target = sources
            .get(&self.target_name)
            .ok_or_else(|| Error::UnknownSeries(self.target_name.clone()))?;
        let matrix = |features: &[FeatureSpec], src: &SeriesMap, range| {
            assemble(features, src, &self.target_name, Transform::Identity, range)
        };
        let mut rows = Vec::with_capacity(self.subs.len() + 1);
        for (i, (e, label)) in self.subs.iter().zip(&self.labels).enumerate() {
            let r = matrix(&e.features, sources, self.train_range)
                .and_then(|tr| {
                    let te = matrix(&e.features, sources, self.test_range)?;
                    report(e, &tr, &te, target)
                })
                .map_err(|err| Error::SubNetwork {
                    index: i + 1,
                    source: Box::new(err),
                })?;
            rows.push((label.clone(), r));
        }
        let mfeatures = master_features(&self.subs);
        let master_matrix = |range| {
            let mut src = self.sub_predictions(sources, range)?;
            src.insert(self.target_name.clone(), target.clone());
            matrix(&mfeatures, &src, range)
        };
        let tr = master_matrix(self.train_range)?;
        let te = master_matrix(self.test_range)?;
        rows.push((MASTER_LABEL.to_string(), report(&self.master, &tr, &te, target)?));
        Ok(rows)
    }

    /// Error percentages of the master over a range with known target.
    pub fn master_error_percent(&self, sources: &SeriesMap, range: MonthRange) -> Result<f64> {
        let mut preds = self.sub_predictions(sources, range)?;
        let target = sources
            .get(&self.target_name)
            .ok_or_else(|| Error::UnknownSeries(self.target_name.clone()))?;
        preds.insert(self.target_name.clone(), target.clone());
        let m = assemble(
            &master_features(&self.subs),
            &preds,
            &self.target_name,
            Transform::Identity,
            range,
        )?;
        error_percent(&self.master, &m)
    }
}

/// Master predictions over `range`.
pub fn predict_ensemble(
    model: &EnsembleModel,
    sources: &SeriesMap,
    range: MonthRange,
) -> Result<TimeSeries> {
    predict(&model.master, &model.master_inputs(sources, range)?)
}
