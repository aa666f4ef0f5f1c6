//! Architecture grid search and best-of-N random restarts.

use crate::error::{Error, Result};
use crate::metrics::{MetricsReport, Sharpe};
use crate::mlp::{error_percent, predict, train, Activation, MlpNetwork, TrainConfig, TrainedExpert};
use crate::preprocess::FeatureMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Candidates whose combined score is within this many percentage points of
/// the best are considered tied; the one with fewest parameters wins.
pub const SCORE_TIE_TOLERANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchitectureGrid {
    pub hidden_layer_counts: Vec<usize>,
    pub nodes_per_layer: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub train_config: TrainConfig,
}

impl Default for ArchitectureGrid {
    fn default() -> Self {
        Self {
            hidden_layer_counts: vec![1, 2],
            nodes_per_layer: vec![2, 4, 8, 16],
            hidden_activation: Activation::Logistic,
            output_activation: Activation::Linear,
            train_config: TrainConfig::default(),
        }
    }
}

impl ArchitectureGrid {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_layer_counts.is_empty() || self.nodes_per_layer.is_empty() {
            return Err(Error::Config("architecture grid lists must be non-empty".into()));
        }
        if self.hidden_layer_counts.contains(&0) || self.nodes_per_layer.contains(&0) {
            return Err(Error::Config("architecture grid sizes must be >= 1".into()));
        }
        self.train_config.validate()
    }

    /// Full layer-size lists for `n_in` inputs and one output, in
    /// layer-count-major order.
    pub fn shapes(&self, n_in: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for &layers in &self.hidden_layer_counts {
            for &nodes in &self.nodes_per_layer {
                let mut s = vec![n_in];
                s.extend(std::iter::repeat_n(nodes, layers));
                s.push(1);
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-candidate seed derived from the layer sizes and a base seed.
pub fn candidate_seed(shape: &[usize], base_seed: u64) -> u64 {
    let h = shape
        .iter()
        .fold(splitmix64(base_seed), |h, &s| splitmix64(h ^ s as u64));
    splitmix64(h ^ shape.len() as u64)
}

fn param_count(shape: &[usize]) -> usize {
    shape.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// Initializes and trains one network of the given shape.
pub fn train_shape(
    shape: &[usize],
    hidden: Activation,
    output: Activation,
    config: &TrainConfig,
    matrix: &FeatureMatrix,
) -> Result<TrainedExpert> {
    let net = MlpNetwork::init(shape, hidden, output, config)?;
    train(net, matrix, config)
}

/// Validation SRM of an expert's predictions against the matrix target.
pub fn validation_sharpe(expert: &TrainedExpert, validation: &FeatureMatrix) -> Result<Sharpe> {
    let pred = predict(expert, validation)?;
    let actual = validation.target_series()?;
    Ok(MetricsReport::from_predictions(&actual, &pred, 0.0, 0.0)?.sharpe)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLog {
    pub candidate: usize,
    pub shape: Vec<usize>,
    pub seed: u64,
    pub train_error_pct: Option<f64>,
    pub validation_error_pct: Option<f64>,
    /// `max(train, validation)`; infinite for a failed candidate.
    pub combined: f64,
    pub srm: Option<Sharpe>,
    pub failure: Option<String>,
    pub wallclock_secs: f64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_index: usize,
    pub best_shape: Vec<usize>,
    pub best_expert: TrainedExpert,
    pub log: Vec<CandidateLog>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl SearchOutcome {
    /// `candidate,shape,seed,train_err,val_err,srm[,wallclock]`.
    pub fn log_csv(&self, timings: bool) -> String {
        let mut out = String::from("candidate,shape,seed,train_err,val_err,srm");
        out.push_str(if timings { ",wallclock\n" } else { "\n" });
        for c in &self.log {
            let shape = c.shape.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("-");
            out.push_str(&format!(
                "{},{shape},{},{},{},{}",
                c.candidate,
                c.seed,
                opt(c.train_error_pct),
                opt(c.validation_error_pct),
                c.srm.map_or_else(String::new, |s| s.to_string()),
            ));
            if timings {
                out.push_str(&format!(",{}", c.wallclock_secs));
            }
            out.push('\n');
        }
        out
    }
}

/// Trains one expert per grid shape and returns the one minimizing
/// `max(train error %, validation error %)`.
pub fn search_best_net(
    grid: &ArchitectureGrid,
    train_matrix: &FeatureMatrix,
    validation_matrix: &FeatureMatrix,
) -> Result<SearchOutcome> {
    grid.validate()?;
    if train_matrix.n_rows() == 0 || validation_matrix.n_rows() == 0 {
        return Err(Error::invalid("search needs non-empty matrices"));
    }
    let shapes = grid.shapes(train_matrix.n_cols());
    let base = grid.train_config.rng_seed;
    let results: Vec<(CandidateLog, Option<TrainedExpert>)> = shapes
        .par_iter()
        .enumerate()
        .map(|(i, shape)| {
            let seed = candidate_seed(shape, base);
            let config = TrainConfig {
                rng_seed: seed,
                ..grid.train_config
            };
            let t0 = Instant::now();
            let evaluated = train_shape(
                shape,
                grid.hidden_activation,
                grid.output_activation,
                &config,
                train_matrix,
            )
            .and_then(|e| {
                let tr = error_percent(&e, train_matrix)?;
                let va = error_percent(&e, validation_matrix)?;
                let srm = validation_sharpe(&e, validation_matrix).ok();
                Ok((e, tr, va, srm))
            });
            let wallclock_secs = t0.elapsed().as_secs_f64();
            let mut log = CandidateLog {
                candidate: i,
                shape: shape.clone(),
                seed,
                train_error_pct: None,
                validation_error_pct: None,
                combined: f64::INFINITY,
                srm: None,
                failure: None,
                wallclock_secs,
            };
            match evaluated {
                Ok((e, tr, va, srm)) => {
                    log.train_error_pct = Some(tr);
                    log.validation_error_pct = Some(va);
                    log.combined = if tr.is_finite() && va.is_finite() { tr.max(va) } else { f64::INFINITY };
                    log.srm = srm;
                    (log, Some(e))
                }
                Err(err) => {
                    log.failure = Some(err.to_string());
                    (log, None)
                }
            }
        })
        .collect();

    let best_score = results
        .iter()
        .map(|(l, _)| l.combined)
        .fold(f64::INFINITY, f64::min);
    if !best_score.is_finite() {
        return Err(Error::Degenerate("every architecture candidate failed".into()));
    }
    let best_index = results
        .iter()
        .filter(|(l, _)| l.combined <= best_score + SCORE_TIE_TOLERANCE)
        .min_by(|(a, _), (b, _)| {
            param_count(&a.shape)
                .cmp(&param_count(&b.shape))
                .then(a.combined.total_cmp(&b.combined))
                .then(a.candidate.cmp(&b.candidate))
        })
        .map(|(l, _)| l.candidate)
        .expect("a finite candidate exists");
    let (log, mut experts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(SearchOutcome {
        best_index,
        best_shape: log[best_index].shape.clone(),
        best_expert: experts[best_index].take().expect("finite score implies a trained expert"),
        log,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpeSearch {
    pub shape: Vec<usize>,
    #[serde(default = "logistic")]
    pub hidden_activation: Activation,
    #[serde(default = "linear")]
    pub output_activation: Activation,
    /// Restart `i` uses `config.rng_seed + i`.
    #[serde(default)]
    pub config: TrainConfig,
    /// Stops as soon as a restart reaches this validation SRM.
    #[serde(default = "never")]
    pub target_srm: f64,
    pub max_restarts: usize,
}

/// Initial weight bound for restart searches.
pub const RESTART_INIT_BOUND: f64 = 1.0;

impl SharpeSearch {
    /// Logistic hidden layer, linear output, default training settings with
    /// [`RESTART_INIT_BOUND`], no early stop.
    pub fn new(shape: Vec<usize>, max_restarts: usize, base_seed: u64) -> Self {
        Self {
            shape,
            hidden_activation: Activation::Logistic,
            output_activation: Activation::Linear,
            config: TrainConfig {
                init_weight_bound: RESTART_INIT_BOUND,
                rng_seed: base_seed,
                ..TrainConfig::default()
            },
            target_srm: f64::INFINITY,
            max_restarts,
        }
    }
}

fn logistic() -> Activation {
    Activation::Logistic
}

fn linear() -> Activation {
    Activation::Linear
}

fn never() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartLog {
    pub restart: usize,
    pub seed: u64,
    /// `None` when the restart diverged.
    pub srm: Option<Sharpe>,
}

#[derive(Debug, Clone)]
pub struct SharpeOutcome {
    pub expert: TrainedExpert,
    pub restart_index: usize,
    pub srm: Sharpe,
    pub history: Vec<RestartLog>,
}

/// Retrains from fresh random weights up to `max_restarts` times and keeps
/// the expert with the highest validation SRM (earliest restart on ties).
/// `target_srm = inf` never stops early, except on a no-loss restart.
pub fn maximize_sharpe(
    search: &SharpeSearch,
    train_matrix: &FeatureMatrix,
    validation_matrix: &FeatureMatrix,
) -> Result<SharpeOutcome> {
    if search.max_restarts == 0 {
        return Err(Error::Config("max_restarts must be >= 1".into()));
    }
    let mut best: Option<(TrainedExpert, usize, Sharpe)> = None;
    let mut history = Vec::new();
    for restart in 0..search.max_restarts {
        let seed = search.config.rng_seed.wrapping_add(restart as u64);
        let config = TrainConfig {
            rng_seed: seed,
            ..search.config
        };
        let expert = match train_shape(
            &search.shape,
            search.hidden_activation,
            search.output_activation,
            &config,
            train_matrix,
        ) {
            Ok(e) => e,
            Err(Error::Diverged { .. }) => {
                history.push(RestartLog { restart, seed, srm: None });
                continue;
            }
            Err(e) => return Err(e),
        };
        let srm = validation_sharpe(&expert, validation_matrix)?;
        history.push(RestartLog {
            restart,
            seed,
            srm: Some(srm),
        });
        if best.as_ref().is_none_or(|(_, _, b)| srm > *b) {
            best = Some((expert, restart, srm));
        }
        if srm >= Sharpe::Finite(search.target_srm) {
            break;
        }
    }
    let (expert, restart_index, srm) =
        best.ok_or(Error::Diverged { epoch: search.config.max_epochs })?;
    Ok(SharpeOutcome {
        expert,
        restart_index,
        srm,
        history,
    })
}
