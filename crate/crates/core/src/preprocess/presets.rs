//! The eight built-in sub-network input structures.
//!
//! Raw inputs enter at their optimal lags; `Var X` rows are first differences
//! at the same lag. The cycle-derived rows ("5 MA's" / "4 BA's") are expanded
//! once the dominant cycle `P` of the target is known: moving averages of
//! window `round(P/4)` at lags `round(j*P/5)`, `j = 1..=5`, and block averages
//! of the same window at distances `round(j*P/4)`, `j = 1..=4`, both taken
//! over the target after exponential smoothing with the network's beta.

use super::{FeatureSpec, Transform};
use crate::timeseries::{PREDICTOR_LEADS, TARGET_NAME};
use serde::{Deserialize, Serialize};

pub const PRESET_NAMES: [&str; 8] = [
    "network1", "network2", "network3", "network4", "network5", "network6", "network7", "network8",
];

const NETWORK_BETAS: [Option<f64>; 8] = [
    Some(0.2),
    None,
    Some(0.25),
    None,
    None,
    Some(0.1),
    Some(0.2),
    Some(0.3),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresetFeature {
    Plain(FeatureSpec),
    /// Smoothed moving averages at `count` cycle-spaced lags.
    FourierMa {
        source: String,
        count: usize,
        beta: Option<f64>,
    },
    /// Smoothed block averages at `count` cycle-spaced distances.
    FourierBa {
        source: String,
        count: usize,
        beta: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkPreset {
    pub name: String,
    pub beta: Option<f64>,
    pub features: Vec<PresetFeature>,
}

impl NetworkPreset {
    /// Concrete feature list for a detected cycle of `cycle_period` months.
    pub fn expand(&self, cycle_period: usize) -> Vec<FeatureSpec> {
        let mut out = Vec::new();
        for f in &self.features {
            match f {
                PresetFeature::Plain(spec) => out.push(spec.clone()),
                PresetFeature::FourierMa {
                    source,
                    count,
                    beta,
                } => out.extend(fourier_ma_features(source, *count, *beta, cycle_period)),
                PresetFeature::FourierBa {
                    source,
                    count,
                    beta,
                } => out.extend(fourier_ba_features(source, *count, *beta, cycle_period)),
            }
        }
        out
    }

    pub fn needs_cycle(&self) -> bool {
        self.features
            .iter()
            .any(|f| !matches!(f, PresetFeature::Plain(_)))
    }
}

fn cycle_window(period: usize) -> usize {
    ((period as f64 / 4.0).round() as usize).max(1)
}

/// `round(j * period / count)` for `j = 1..=count`, at least 1, deduplicated.
fn cycle_lags(period: usize, count: usize) -> Vec<usize> {
    let mut lags: Vec<usize> = (1..=count)
        .map(|j| ((j * period) as f64 / count as f64).round().max(1.0) as usize)
        .collect();
    lags.dedup();
    lags
}

fn smoothed(mut spec: FeatureSpec, beta: Option<f64>) -> FeatureSpec {
    spec.beta = beta;
    spec
}

pub fn fourier_ma_features(
    source: &str,
    count: usize,
    beta: Option<f64>,
    period: usize,
) -> Vec<FeatureSpec> {
    let window = cycle_window(period);
    cycle_lags(period, count)
        .into_iter()
        .map(|lag| smoothed(FeatureSpec::new(source, Transform::Sma { window }, lag), beta))
        .collect()
}

pub fn fourier_ba_features(
    source: &str,
    count: usize,
    beta: Option<f64>,
    period: usize,
) -> Vec<FeatureSpec> {
    let window = cycle_window(period);
    cycle_lags(period, count)
        .into_iter()
        .map(|distance| {
            smoothed(
                FeatureSpec::new(source, Transform::BlockAvg { window, distance }, 0),
                beta,
            )
        })
        .collect()
}

fn lead_of(name: &str) -> usize {
    PREDICTOR_LEADS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, l)| l)
        .expect("known predictor")
}

fn raw(name: &str) -> PresetFeature {
    PresetFeature::Plain(FeatureSpec::raw(name, lead_of(name)))
}

fn var(name: &str) -> PresetFeature {
    PresetFeature::Plain(FeatureSpec::new(name, Transform::Diff, lead_of(name)))
}

fn fourier(beta: Option<f64>) -> [PresetFeature; 2] {
    [
        PresetFeature::FourierMa {
            source: TARGET_NAME.into(),
            count: 5,
            beta,
        },
        PresetFeature::FourierBa {
            source: TARGET_NAME.into(),
            count: 4,
            beta,
        },
    ]
}

const MARKET: [&str; 11] = [
    "gwh",
    "ibc",
    "sp500",
    "crude",
    "tbills",
    "gold",
    "copper",
    "eurodollar",
    "crb",
    "dowjones",
    "loans_rate",
];

/// Built-in preset by name (`network1` .. `network8`).
pub fn preset(name: &str) -> Option<NetworkPreset> {
    let idx = PRESET_NAMES.iter().position(|n| *n == name)?;
    let beta = NETWORK_BETAS[idx];
    let all_vars = || MARKET.iter().map(|n| var(n));
    let features: Vec<PresetFeature> = match idx {
        0 | 5 | 7 => fourier(beta).into(),
        1 => std::iter::once(raw("ipc")).chain(all_vars()).collect(),
        2 => MARKET
            .iter()
            .map(|n| raw(n))
            .chain([
                raw("ipc"),
                PresetFeature::Plain(FeatureSpec::raw(TARGET_NAME, 12).with_beta(0.25)),
            ])
            .collect(),
        3 => std::iter::once(raw("ipc"))
            .chain(
                ["gwh", "ibc", "crude", "eurodollar", "loans_rate"]
                    .iter()
                    .map(|n| var(n)),
            )
            .chain([
                PresetFeature::Plain(FeatureSpec::new(
                    TARGET_NAME,
                    Transform::LogVarMa { window: 3 },
                    12,
                )),
                PresetFeature::Plain(FeatureSpec::new(
                    TARGET_NAME,
                    Transform::RollingStd { window: 12 },
                    12,
                )),
            ])
            .collect(),
        4 => std::iter::once(raw("ipc"))
            .chain(
                [
                    "gwh",
                    "ibc",
                    "sp500",
                    "crude",
                    "tbills",
                    "copper",
                    "eurodollar",
                    "crb",
                    "loans_rate",
                ]
                .iter()
                .map(|n| var(n)),
            )
            .collect(),
        6 => std::iter::once(raw("ipc"))
            .chain(all_vars())
            .chain(fourier(beta))
            .collect(),
        _ => unreachable!(),
    };
    Some(NetworkPreset {
        name: name.to_string(),
        beta,
        features,
    })
}

pub fn presets() -> Vec<NetworkPreset> {
    PRESET_NAMES.iter().filter_map(|n| preset(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_counts_at_annual_cycle() {
        let counts: Vec<usize> = presets().iter().map(|p| p.expand(12).len()).collect();
        assert_eq!(counts, vec![9, 12, 13, 8, 10, 9, 21, 9]);
    }

    #[test]
    fn betas_follow_the_header() {
        let betas: Vec<Option<f64>> = presets().iter().map(|p| p.beta).collect();
        assert_eq!(betas, NETWORK_BETAS.to_vec());
    }

    #[test]
    fn annual_cycle_lags() {
        assert_eq!(cycle_lags(12, 5), vec![2, 5, 7, 10, 12]);
        assert_eq!(cycle_lags(12, 4), vec![3, 6, 9, 12]);
        assert_eq!(cycle_window(12), 3);
        assert_eq!(cycle_lags(2, 5), vec![1, 2]);
        let ma = fourier_ma_features(TARGET_NAME, 5, Some(0.2), 12);
        assert_eq!(ma[0], FeatureSpec::new(TARGET_NAME, Transform::Sma { window: 3 }, 2).with_beta(0.2));
        let ba = fourier_ba_features(TARGET_NAME, 4, Some(0.2), 12);
        assert_eq!(ba[3].transform, Transform::BlockAvg { window: 3, distance: 12 });
        assert_eq!(ba[3].lag, 0);
    }

    #[test]
    fn network3_uses_raw_inputs_at_their_lags() {
        let f = preset("network3").unwrap().expand(12);
        assert!(f.contains(&FeatureSpec::raw("crb", 12)));
        assert!(f.contains(&FeatureSpec::raw("loans_rate", 1)));
        assert!(f.contains(&FeatureSpec::raw("ipc", 9)));
        assert!(f.contains(&FeatureSpec::raw(TARGET_NAME, 12).with_beta(0.25)));
        assert!(!preset("network3").unwrap().needs_cycle());
        assert!(preset("network1").unwrap().needs_cycle());
        assert!(preset("network9").is_none());
    }

    #[test]
    fn no_feature_reads_the_current_target() {
        for p in presets() {
            for f in p.expand(12) {
                if f.source == TARGET_NAME {
                    let ends_before = match f.transform {
                        Transform::BlockAvg { distance, .. } => distance + f.lag,
                        _ => f.lag,
                    };
                    assert!(ends_before >= 1, "{} leaks: {}", p.name, f.label());
                }
            }
        }
    }
}
