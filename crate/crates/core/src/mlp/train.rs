use super::{Activation, MlpNetwork, Workspace};
use crate::error::{Error, Result};
use crate::preprocess::{FeatureMatrix, FeatureSpec};
use crate::timeseries::{MonthRange, TimeSeries};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub init_weight_bound: f64,
    pub max_epochs: usize,
    /// Training stops once the epoch's mean squared error (normalized units)
    /// is at or below this value. `0` disables early stopping.
    pub target_error: f64,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            init_weight_bound: 0.3,
            max_epochs: 5000,
            target_error: 0.0,
            rng_seed: DEFAULT_SEED,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.init_weight_bound.is_finite() && self.init_weight_bound >= 0.0) {
            return Err(Error::Config(format!(
                "init_weight_bound must be >= 0, got {}",
                self.init_weight_bound
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be >= 1".into()));
        }
        if self.target_error.is_nan() || self.target_error < 0.0 {
            return Err(Error::Config(format!(
                "target_error must be >= 0, got {}",
                self.target_error
            )));
        }
        Ok(())
    }
}

/// `normalized = (x - shift) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub shift: f64,
    pub scale: f64,
}

impl Affine {
    pub const IDENTITY: Affine = Affine {
        shift: 0.0,
        scale: 1.0,
    };

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    #[inline]
    pub fn invert(&self, y: f64) -> f64 {
        y * self.scale + self.shift
    }

    fn zscore(values: &[f64]) -> Affine {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        let scale = if sd > 1e-12 * mean.abs().max(1.0) { sd } else { 1.0 };
        Affine { shift: mean, scale }
    }

    /// Maps `[min, max]` onto `[0.1, 0.9]`.
    fn squash(values: &[f64]) -> Affine {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > 1e-12 * lo.abs().max(1.0) {
            let scale = (hi - lo) / 0.8;
            Affine {
                shift: lo - 0.1 * scale,
                scale,
            }
        } else {
            Affine {
                shift: lo - 0.5,
                scale: 1.0,
            }
        }
    }
}

/// Per-column input maps plus the target map, fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub inputs: Vec<Affine>,
    pub target: Affine,
}

impl Normalizer {
    /// Inputs are standardized. The target is squashed into `[0.1, 0.9]` for a
    /// logistic output and standardized for a linear one.
    pub fn fit(rows: &[Vec<f64>], target: &[f64], output: Activation) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::invalid("cannot fit a normalizer on zero rows"));
        };
        let inputs = (0..first.len())
            .map(|j| Affine::zscore(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
            .collect();
        let target = match output {
            Activation::Logistic => Affine::squash(target),
            Activation::Linear => Affine::zscore(target),
        };
        Ok(Self { inputs, target })
    }

    pub fn normalize_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.inputs).map(|(x, a)| a.apply(*x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedExpert {
    pub name: String,
    pub network: MlpNetwork,
    pub normalizer: Normalizer,
    pub features: Vec<FeatureSpec>,
    pub train_range: MonthRange,
    #[serde(default)]
    pub test_range: Option<MonthRange>,
    /// Mean squared error over the training rows in normalized target units.
    pub final_train_error: f64,
    pub epochs: usize,
    pub rng_seed: u64,
    pub config: TrainConfig,
}

impl TrainedExpert {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn n_params(&self) -> usize {
        self.network.param_count()
    }

    /// Mean squared error of `matrix` in normalized target units.
    pub fn normalized_mse(&self, matrix: &FeatureMatrix) -> Result<f64> {
        let pred = predict(self, matrix)?;
        let t = matrix.target()?;
        let a = self.normalizer.target;
        Ok(pred
            .values()
            .iter()
            .zip(t)
            .map(|(p, y)| (a.apply(*p) - a.apply(*y)).powi(2))
            .sum::<f64>()
            / t.len() as f64)
    }
}

fn epoch_mse(net: &MlpNetwork, patterns: &[(Vec<f64>, f64)], ws: &mut Workspace) -> f64 {
    let sse: f64 = patterns
        .iter()
        .map(|(x, y)| {
            net.forward_ws(x, ws);
            (ws.output()[0] - y).powi(2)
        })
        .sum();
    sse / patterns.len() as f64
}

/// Online gradient descent over the matrix rows in their fixed order.
///
/// One epoch is a full pass of per-pattern updates. Training ends when the
/// epoch error reaches `config.target_error` or after `config.max_epochs`.
pub fn train(
    mut net: MlpNetwork,
    matrix: &FeatureMatrix,
    config: &TrainConfig,
) -> Result<TrainedExpert> {
    config.validate()?;
    if matrix.n_rows() == 0 {
        return Err(Error::invalid("cannot train on an empty matrix"));
    }
    if net.n_inputs() != matrix.n_cols() {
        return Err(Error::Dimension {
            expected: net.n_inputs(),
            got: matrix.n_cols(),
        });
    }
    if net.n_outputs() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            got: net.n_outputs(),
        });
    }
    let target = matrix.target()?;
    let normalizer = Normalizer::fit(matrix.rows(), target, net.output_activation())?;
    let patterns: Vec<(Vec<f64>, f64)> = matrix
        .rows()
        .iter()
        .zip(target)
        .map(|(r, y)| (normalizer.normalize_row(r), normalizer.target.apply(*y)))
        .collect();

    let mut ws = Workspace::new(&net);
    let mut error = f64::NAN;
    let mut epochs = 0;
    for epoch in 1..=config.max_epochs {
        let mut running = 0.0;
        for (x, y) in &patterns {
            running += net.step(x, std::slice::from_ref(y), config.learning_rate, &mut ws);
        }
        if !running.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        epochs = epoch;
        // The full evaluation pass is only needed for the stop test and at the end.
        if config.target_error > 0.0 || epoch == config.max_epochs {
            error = epoch_mse(&net, &patterns, &mut ws);
            if !error.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            if error <= config.target_error {
                break;
            }
        }
    }

    Ok(TrainedExpert {
        name: String::new(),
        network: net,
        normalizer,
        features: matrix.features().to_vec(),
        train_range: matrix.range(),
        test_range: None,
        final_train_error: error,
        epochs,
        rng_seed: config.rng_seed,
        config: *config,
    })
}

pub fn predict(expert: &TrainedExpert, matrix: &FeatureMatrix) -> Result<TimeSeries> {
    if matrix.features() != expert.features.as_slice() {
        return Err(Error::FeatureMismatch(format!(
            "expert `{}` expects {} features [{}], matrix has [{}]",
            expert.name,
            expert.features.len(),
            labels(&expert.features),
            labels(matrix.features())
        )));
    }
    let net = &expert.network;
    let mut ws = Workspace::new(net);
    let values = matrix
        .rows()
        .iter()
        .map(|r| {
            net.forward_ws(&expert.normalizer.normalize_row(r), &mut ws);
            expert.normalizer.target.invert(ws.output()[0])
        })
        .collect();
    TimeSeries::new(matrix.range().start, values)
}

fn labels(f: &[FeatureSpec]) -> String {
    f.iter().map(FeatureSpec::label).collect::<Vec<_>>().join(", ")
}

/// `100 * mean|prediction - target| / mean|target|` over the matrix rows.
pub fn error_percent(expert: &TrainedExpert, matrix: &FeatureMatrix) -> Result<f64> {
    let pred = predict(expert, matrix)?;
    relative_mae_percent(pred.values(), matrix.target()?)
}

pub(crate) fn relative_mae_percent(pred: &[f64], target: &[f64]) -> Result<f64> {
    if target.is_empty() {
        return Err(Error::invalid("error percentage of an empty matrix"));
    }
    let scale: f64 = target.iter().map(|t| t.abs()).sum();
    if scale == 0.0 {
        return Err(Error::Degenerate("target is identically zero".into()));
    }
    let err: f64 = pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum();
    Ok(100.0 * err / scale)
}
