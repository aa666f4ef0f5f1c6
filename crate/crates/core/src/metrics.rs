//! Directional trading indicators, error measures and equity curves.
//!
//! A signal series has one entry per transition of the evaluated range: entry
//! `i` is the position (+1 long, -1 short) held over the move from
//! observation `i` to `i + 1`, and is dated at observation `i + 1`.

use crate::error::{Error, Result};
use crate::mlp::{error_percent, predict, TrainedExpert};
use crate::preprocess::FeatureMatrix;
use crate::timeseries::{MonthStamp, TimeSeries};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalSeries {
    start: MonthStamp,
    values: Vec<i8>,
}

impl SignalSeries {
    pub fn new(start: MonthStamp, values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("signal series must be non-empty"));
        }
        if values.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::invalid("signals must be +1 or -1"));
        }
        Ok(Self { start, values })
    }

    pub fn start(&self) -> MonthStamp {
        self.start
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Self {
            start: self.start,
            values: self.values.iter().map(|s| -s).collect(),
        }
    }
}

/// Modified Sharpe ratio; `NoLoss` ranks above every finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sharpe {
    Finite(f64),
    NoLoss,
}

impl Sharpe {
    pub fn finite(self) -> Option<f64> {
        match self {
            Sharpe::Finite(v) => Some(v),
            Sharpe::NoLoss => None,
        }
    }

    pub fn is_no_loss(self) -> bool {
        matches!(self, Sharpe::NoLoss)
    }
}

impl Eq for Sharpe {}

impl Ord for Sharpe {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Sharpe::NoLoss, Sharpe::NoLoss) => Ordering::Equal,
            (Sharpe::NoLoss, _) => Ordering::Greater,
            (_, Sharpe::NoLoss) => Ordering::Less,
            (Sharpe::Finite(a), Sharpe::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl PartialOrd for Sharpe {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_LOSS: &str = "no-loss";

impl fmt::Display for Sharpe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sharpe::Finite(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Sharpe::NoLoss => f.write_str(NO_LOSS),
        }
    }
}

impl Serialize for Sharpe {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sharpe::Finite(v) => s.serialize_f64(*v),
            Sharpe::NoLoss => s.serialize_str(NO_LOSS),
        }
    }
}

impl<'de> Deserialize<'de> for Sharpe {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Sharpe::Finite(v)),
            Raw::Text(t) if t == NO_LOSS => Ok(Sharpe::NoLoss),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid sharpe value `{t}`"))),
        }
    }
}

fn check_aligned(a: &TimeSeries, b: &TimeSeries) -> Result<()> {
    if a.start() != b.start() || a.len() != b.len() {
        return Err(Error::Misaligned(format!(
            "{} vs {}",
            a.range(),
            b.range()
        )));
    }
    Ok(())
}

fn check_signals(actual: &TimeSeries, signals: &SignalSeries) -> Result<()> {
    if actual.len() < 2 {
        return Err(Error::TooShort {
            name: "actual".into(),
            needed: 2,
            have: actual.len(),
        });
    }
    if signals.len() != actual.len() - 1 || signals.start() != actual.start().succ() {
        return Err(Error::Misaligned(format!(
            "{} signals from {} against actual {}",
            signals.len(),
            signals.start(),
            actual.range()
        )));
    }
    Ok(())
}

pub(crate) fn deltas(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Signal rule on raw values; zero change repeats the previous signal.
pub(crate) fn signal_values(predicted: &[f64]) -> Vec<i8> {
    let mut prev = 1i8;
    predicted
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d > 0.0 {
                prev = 1;
            } else if d < 0.0 {
                prev = -1;
            }
            prev
        })
        .collect()
}

pub fn signals_from_prediction(predicted: &TimeSeries) -> Result<SignalSeries> {
    if predicted.len() < 2 {
        return Err(Error::TooShort {
            name: "predicted".into(),
            needed: 2,
            have: predicted.len(),
        });
    }
    SignalSeries::new(predicted.start().succ(), signal_values(predicted.values()))
}

pub(crate) fn hit_pct_of(moves: &[f64], signals: &[i8]) -> f64 {
    let hits = moves
        .iter()
        .zip(signals)
        .filter(|(d, s)| **d == 0.0 || (**d > 0.0) == (**s > 0))
        .count();
    100.0 * hits as f64 / moves.len() as f64
}

pub fn hit_rate(actual: &TimeSeries, predicted: &TimeSeries) -> Result<f64> {
    check_aligned(actual, predicted)?;
    let signals = signals_from_prediction(predicted)?;
    Ok(hit_pct_of(&deltas(actual.values()), signals.values()))
}

/// Hit percentage of an explicit signal series.
pub fn signal_hit_rate(actual: &TimeSeries, signals: &SignalSeries) -> Result<f64> {
    check_signals(actual, signals)?;
    Ok(hit_pct_of(&deltas(actual.values()), signals.values()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquityCurves {
    pub strategy: TimeSeries,
    pub perfect: TimeSeries,
    pub buy_hold: TimeSeries,
}

impl EquityCurves {
    /// Long format `date,value,curve`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,value,curve\n");
        for (name, c) in [
            ("strategy", &self.strategy),
            ("perfect", &self.perfect),
            ("buy_hold", &self.buy_hold),
        ] {
            for (d, v) in c.iter() {
                out.push_str(&format!("{d},{v},{name}\n"));
            }
        }
        out
    }
}

fn cumsum(it: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    it.map(|x| {
        acc += x;
        acc
    })
    .collect()
}

pub fn equity_curves(actual: &TimeSeries, signals: &SignalSeries) -> Result<EquityCurves> {
    check_signals(actual, signals)?;
    let d = deltas(actual.values());
    let a0 = actual.values()[0];
    let start = signals.start();
    Ok(EquityCurves {
        strategy: TimeSeries::new(
            start,
            cumsum(d.iter().zip(signals.values()).map(|(x, s)| *s as f64 * x)),
        )?,
        perfect: TimeSeries::new(start, cumsum(d.iter().map(|x| x.abs())))?,
        buy_hold: TimeSeries::new(start, actual.values()[1..].iter().map(|v| v - a0).collect())?,
    })
}

fn flat_error() -> Error {
    Error::Degenerate("actual series is flat; no gain is obtainable".into())
}

pub(crate) fn efficiency_of(moves: &[f64], signals: &[i8]) -> Result<f64> {
    let max_gain: f64 = moves.iter().map(|d| d.abs()).sum();
    if max_gain == 0.0 {
        return Err(flat_error());
    }
    let gain: f64 = moves.iter().zip(signals).map(|(d, s)| *s as f64 * d).sum();
    Ok(100.0 * gain / max_gain)
}

pub fn efficiency(actual: &TimeSeries, signals: &SignalSeries) -> Result<f64> {
    check_signals(actual, signals)?;
    efficiency_of(&deltas(actual.values()), signals.values())
}

pub(crate) fn sharpe_of(moves: &[f64], signals: &[i8]) -> Result<Sharpe> {
    let eff = efficiency_of(moves, signals)?;
    let (loss_sum, k) = moves
        .iter()
        .zip(signals)
        .map(|(d, s)| *s as f64 * d)
        .filter(|r| *r < 0.0)
        .fold((0.0, 0usize), |(sum, k), r| (sum - r, k + 1));
    if k == 0 {
        return Ok(Sharpe::NoLoss);
    }
    let avg_drawdown = loss_sum / k as f64;
    let mean_move = moves.iter().map(|d| d.abs()).sum::<f64>() / moves.len() as f64;
    Ok(Sharpe::Finite((eff / 100.0) / (avg_drawdown / mean_move)))
}

/// `(efficiency/100) / (mean loss per losing move / mean |move|)`.
pub fn sharpe_modified(actual: &TimeSeries, signals: &SignalSeries) -> Result<Sharpe> {
    check_signals(actual, signals)?;
    sharpe_of(&deltas(actual.values()), signals.values())
}

/// Mean absolute error (EAM).
pub fn mean_error(actual: &TimeSeries, predicted: &TimeSeries) -> Result<f64> {
    check_aligned(actual, predicted)?;
    Ok(actual
        .values()
        .iter()
        .zip(predicted.values())
        .map(|(a, p)| (a - p).abs())
        .sum::<f64>()
        / actual.len() as f64)
}

/// Root mean squared error (ECM).
pub fn rmse(actual: &TimeSeries, predicted: &TimeSeries) -> Result<f64> {
    check_aligned(actual, predicted)?;
    Ok((actual
        .values()
        .iter()
        .zip(predicted.values())
        .map(|(a, p)| (a - p).powi(2))
        .sum::<f64>()
        / actual.len() as f64)
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub efficiency_pct: f64,
    pub hit_pct: f64,
    pub sharpe: Sharpe,
    pub rmse: f64,
    pub mean_error: f64,
    pub train_error_pct: f64,
    pub test_error_pct: f64,
}

pub const REPORT_COLUMNS: [&str; 7] = [
    "Efficiency %",
    "Hit %",
    "Sharpe Ratio",
    "Mean Quadratic Error",
    "Mean Error",
    "Training Error %",
    "Testing Error %",
];

impl MetricsReport {
    /// Directional and error indicators of `predicted` against `actual`
    /// (same dates), with externally supplied error percentages.
    pub fn from_predictions(
        actual: &TimeSeries,
        predicted: &TimeSeries,
        train_error_pct: f64,
        test_error_pct: f64,
    ) -> Result<Self> {
        check_aligned(actual, predicted)?;
        let signals = signals_from_prediction(predicted)?;
        let moves = deltas(actual.values());
        Ok(Self {
            efficiency_pct: efficiency_of(&moves, signals.values())?,
            hit_pct: hit_pct_of(&moves, signals.values()),
            sharpe: sharpe_of(&moves, signals.values())?,
            rmse: rmse(actual, predicted)?,
            mean_error: mean_error(actual, predicted)?,
            train_error_pct,
            test_error_pct,
        })
    }

    /// Table cells in column order. `locale_comma` swaps the decimal point
    /// for a comma.
    pub fn cells(&self, locale_comma: bool) -> [String; 7] {
        let cells = [
            format!("{:.2}%", self.efficiency_pct),
            format!("{:.2}%", self.hit_pct),
            format!("{:.4}", self.sharpe),
            format!("{:.2}", self.rmse),
            format!("{:.2}", self.mean_error),
            format!("{:.2}%", self.train_error_pct),
            format!("{:.2}%", self.test_error_pct),
        ];
        if locale_comma {
            cells.map(|c| c.replace('.', ","))
        } else {
            cells
        }
    }

    pub fn row(&self, locale_comma: bool) -> String {
        self.cells(locale_comma).join(" | ")
    }
}

/// Indicators over the test matrix range and error percentages over both
/// matrices. `actual` must cover the test range.
pub fn report(
    expert: &TrainedExpert,
    train_matrix: &FeatureMatrix,
    test_matrix: &FeatureMatrix,
    actual: &TimeSeries,
) -> Result<MetricsReport> {
    let predicted = predict(expert, test_matrix)?;
    let actual = actual.slice(test_matrix.range())?;
    MetricsReport::from_predictions(
        &actual,
        &predicted,
        error_percent(expert, train_matrix)?,
        error_percent(expert, test_matrix)?,
    )
}

/// Aligned text table, one row per named report.
pub fn render_table(rows: &[(String, MetricsReport)], locale_comma: bool) -> String {
    let mut grid: Vec<Vec<String>> = vec![std::iter::once("Networks".to_string())
        .chain(REPORT_COLUMNS.iter().map(|c| c.to_string()))
        .collect()];
    for (name, r) in rows {
        grid.push(std::iter::once(name.clone()).chain(r.cells(locale_comma)).collect());
    }
    let widths: Vec<usize> = (0..grid[0].len())
        .map(|j| grid.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &grid {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, w))| {
                if j == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        out.push_str(line.join(" | ").trim_end());
        out.push('\n');
    }
    out
}

/// CSV with full-precision values, one row per named report.
pub fn render_report_csv(rows: &[(String, MetricsReport)]) -> String {
    let mut out = String::from(
        "network,efficiency_pct,hit_pct,sharpe,rmse,mean_error,train_error_pct,test_error_pct\n",
    );
    for (name, r) in rows {
        out.push_str(&format!(
            "{name},{},{},{},{},{},{},{}\n",
            r.efficiency_pct,
            r.hit_pct,
            r.sharpe,
            r.rmse,
            r.mean_error,
            r.train_error_pct,
            r.test_error_pct
        ));
    }
    out
}
