//! Series transforms: differences, simple/exponential/block averages, lags,
//! log-variation of a moving average, rolling deviation and dominant-cycle
//! detection. All windows are trailing, so no output depends on later months.

mod features;
mod presets;

pub use features::{assemble, assemble_inputs, FeatureMatrix, FeatureSpec};
pub use presets::{
    fourier_ba_features, fourier_ma_features, preset, presets, NetworkPreset, PresetFeature,
    PRESET_NAMES,
};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

/// One column transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Transform {
    Identity,
    Diff,
    Sma { window: usize },
    Ewma { beta: f64 },
    BlockAvg { window: usize, distance: usize },
    LogVarMa { window: usize },
    RollingStd { window: usize },
}

impl Transform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Transform::Sma { window } | Transform::LogVarMa { window } if window == 0 => {
                Err(Error::invalid("window must be >= 1"))
            }
            Transform::BlockAvg { window: 0, .. } => Err(Error::invalid("window must be >= 1")),
            Transform::RollingStd { window } if window < 2 => {
                Err(Error::invalid("rolling deviation window must be >= 2"))
            }
            Transform::Ewma { beta } => check_beta(beta),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, s: &TimeSeries) -> Result<TimeSeries> {
        match *self {
            Transform::Identity => Ok(s.clone()),
            Transform::Diff => diff(s),
            Transform::Sma { window } => sma(s, window),
            Transform::Ewma { beta } => ewma(s, beta),
            Transform::BlockAvg { window, distance } => block_avg(s, window, distance),
            Transform::LogVarMa { window } => log_var_ma(s, window),
            Transform::RollingStd { window } => rolling_stddev(s, window),
        }
    }

    /// Leading months consumed before the first output value.
    pub fn warmup(&self) -> usize {
        match *self {
            Transform::Identity | Transform::Ewma { .. } => 0,
            Transform::Diff => 1,
            Transform::Sma { window } | Transform::RollingStd { window } => window - 1,
            Transform::BlockAvg { window, distance } => window + distance - 1,
            Transform::LogVarMa { window } => window,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Transform::Identity => "id".into(),
            Transform::Diff => "diff".into(),
            Transform::Sma { window } => format!("sma{window}"),
            Transform::Ewma { beta } => format!("ewma{beta}"),
            Transform::BlockAvg { window, distance } => format!("ba{window}d{distance}"),
            Transform::LogVarMa { window } => format!("logvarma{window}"),
            Transform::RollingStd { window } => format!("std{window}"),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("beta must lie in (0, 1], got {beta}")))
    }
}

fn require_len(s: &TimeSeries, needed: usize, what: &str) -> Result<()> {
    if s.len() < needed {
        return Err(Error::TooShort {
            name: what.to_string(),
            needed,
            have: s.len(),
        });
    }
    Ok(())
}

/// First differences `s[j+1] - s[j]`, dated at the later month.
pub fn diff(s: &TimeSeries) -> Result<TimeSeries> {
    require_len(s, 2, "diff input")?;
    let v = s.values();
    TimeSeries::new(s.start().succ(), v.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Trailing simple moving average, dated at the window end.
pub fn sma(s: &TimeSeries, window: usize) -> Result<TimeSeries> {
    if window == 0 {
        return Err(Error::invalid("window must be >= 1"));
    }
    require_len(s, window, "sma input")?;
    let v = s.values();
    let values = v
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    TimeSeries::new(s.start().add_months(window as i64 - 1), values)
}

/// `y[0] = s[0]`, `y[t] = beta * s[t] + (1 - beta) * y[t-1]`.
pub fn ewma(s: &TimeSeries, beta: f64) -> Result<TimeSeries> {
    check_beta(beta)?;
    let mut acc = s.values()[0];
    let values = s
        .values()
        .iter()
        .enumerate()
        .map(|(t, &x)| {
            if t > 0 {
                acc = beta * x + (1.0 - beta) * acc;
            }
            acc
        })
        .collect();
    TimeSeries::new(s.start(), values)
}

/// Mean of the `window` months ending `distance` months before each date.
pub fn block_avg(s: &TimeSeries, window: usize, distance: usize) -> Result<TimeSeries> {
    if window == 0 {
        return Err(Error::invalid("window must be >= 1"));
    }
    require_len(s, window + distance, "block average input")?;
    let v = s.values();
    let first = window + distance - 1;
    let values = (first..v.len())
        .map(|t| v[t + 1 - distance - window..=t - distance].iter().sum::<f64>() / window as f64)
        .collect();
    TimeSeries::new(s.start().add_months(first as i64), values)
}

/// Value at date `t` is the source value at `t - k`.
pub fn lag(s: &TimeSeries, k: usize) -> Result<TimeSeries> {
    require_len(s, k + 1, "lag input")?;
    TimeSeries::new(
        s.start().add_months(k as i64),
        s.values()[..s.len() - k].to_vec(),
    )
}

/// `ln(ma[t] / ma[t-1])` over the trailing moving average of `window` months.
pub fn log_var_ma(s: &TimeSeries, window: usize) -> Result<TimeSeries> {
    require_len(s, window + 1, "log-variation input")?;
    let ma = sma(s, window)?;
    let v = ma.values();
    let mut out = Vec::with_capacity(v.len() - 1);
    for j in 0..v.len() - 1 {
        let ratio = v[j + 1] / v[j];
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::NonPositiveRatio(ma.date_at(j + 1)));
        }
        out.push(ratio.ln());
    }
    TimeSeries::new(ma.start().succ(), out)
}

/// Population standard deviation over each trailing window.
pub fn rolling_stddev(s: &TimeSeries, window: usize) -> Result<TimeSeries> {
    if window < 2 {
        return Err(Error::invalid("rolling deviation window must be >= 2"));
    }
    require_len(s, window, "rolling deviation input")?;
    let n = window as f64;
    let values = s
        .values()
        .windows(window)
        .map(|w| {
            let mean = w.iter().sum::<f64>() / n;
            (w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
        })
        .collect();
    TimeSeries::new(s.start().add_months(window as i64 - 1), values)
}

/// Period (months) of the strongest Fourier component of the mean-removed
/// series. Candidate periods are at most half the length, i.e. frequency bins
/// `2..=N/2`; the period is `round(N / k)`. Near-ties (relative 1e-9) go to
/// the lower bin, i.e. the longer period.
pub fn dominant_cycle(s: &TimeSeries) -> Result<usize> {
    require_len(s, 4, "cycle detection input")?;
    let n = s.len();
    let mean = s.values().iter().sum::<f64>() / n as f64;
    let scale = s.values().iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if s.values().iter().all(|v| (v - mean).abs() <= 1e-12 * scale) {
        return Err(Error::Degenerate("constant series has no cycle".into()));
    }
    let mut buf: Vec<Complex<f64>> = s
        .values()
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut best_k = 2;
    let mut best_mag = buf[2].norm();
    for (k, c) in buf.iter().enumerate().take(n / 2 + 1).skip(3) {
        let mag = c.norm();
        if mag > best_mag * (1.0 + 1e-9) {
            best_k = k;
            best_mag = mag;
        }
    }
    Ok((n as f64 / best_k as f64).round() as usize)
}
