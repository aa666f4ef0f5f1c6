//! Lead/lag scanning of candidate inputs against the target.
//!
//! For each lag `k`, the input shifted forward by `k` months is read as a
//! forecast of the target: its month-on-month direction is the trading
//! signal. No model is trained.

use crate::error::{Error, Result};
use crate::metrics::{
    deltas, efficiency_of, hit_pct_of, sharpe_of, signal_values, Sharpe,
};
use crate::timeseries::{MonthRange, SeriesMap, TimeSeries};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub const DEFAULT_MAX_LAG: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagRow {
    pub lag: usize,
    pub efficiency_pct: f64,
    pub hit_pct: f64,
    pub sharpe: Sharpe,
    pub rmse: f64,
    pub mean_error: f64,
    pub final_equity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagScanResult {
    pub range: MonthRange,
    pub rows: Vec<LagRow>,
    pub chosen_lag: usize,
    /// Strategy equity per lag, in lag order.
    pub strategy_curves: Vec<TimeSeries>,
    pub perfect: TimeSeries,
    pub buy_hold: TimeSeries,
}

impl LagScanResult {
    pub fn chosen(&self) -> &LagRow {
        &self.rows[self.chosen_lag - 1]
    }

    /// `lag,efficiency,hits,srm,final_equity`.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("lag,efficiency,hits,srm,final_equity\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.lag, r.efficiency_pct, r.hit_pct, r.sharpe, r.final_equity
            ));
        }
        out
    }

    /// Long format `date,value,curve` with curves `lag1..lagN`, `perfect`, `buy_hold`.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("date,value,curve\n");
        let named = self
            .strategy_curves
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("lag{}", i + 1), c))
            .chain([
                ("perfect".to_string(), &self.perfect),
                ("buy_hold".to_string(), &self.buy_hold),
            ]);
        for (name, c) in named {
            for (d, v) in c.iter() {
                out.push_str(&format!("{d},{v},{name}\n"));
            }
        }
        out
    }
}

/// Higher SRM first; between no-loss rows higher efficiency; then smaller lag.
fn better(a: &LagRow, b: &LagRow) -> bool {
    match a.sharpe.cmp(&b.sharpe) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            if a.sharpe.is_no_loss() && a.efficiency_pct != b.efficiency_pct {
                a.efficiency_pct > b.efficiency_pct
            } else {
                a.lag < b.lag
            }
        }
    }
}

fn cumsum(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    v.map(|x| {
        acc += x;
        acc
    })
    .collect()
}

/// Scores lags `1..=max_lag` of `input` against `target` over `range`.
pub fn scan(
    input: &TimeSeries,
    target: &TimeSeries,
    max_lag: usize,
    range: MonthRange,
) -> Result<LagScanResult> {
    if max_lag == 0 {
        return Err(Error::invalid("max_lag must be >= 1"));
    }
    if range.len() < 2 {
        return Err(Error::TooShort {
            name: "scan range".into(),
            needed: 2,
            have: range.len(),
        });
    }
    let first_needed = range.start.add_months(-(max_lag as i64));
    if input.start() > first_needed {
        return Err(Error::InsufficientHistory {
            feature: format!("input@lag{max_lag}"),
            short_by: first_needed.months_until(input.start()),
            first_needed,
        });
    }
    let last_needed = range.end.add_months(-1);
    if input.end() < last_needed {
        return Err(Error::Misaligned(format!(
            "input ends {} before {last_needed}",
            input.end()
        )));
    }
    let actual = target.slice(range)?;
    let moves = deltas(actual.values());
    let start = range.start.succ();
    let perfect = TimeSeries::new(start, cumsum(moves.iter().map(|d| d.abs())))?;
    let a0 = actual.values()[0];
    let buy_hold = TimeSeries::new(start, actual.values()[1..].iter().map(|v| v - a0).collect())?;

    let mut rows = Vec::with_capacity(max_lag);
    let mut strategy_curves = Vec::with_capacity(max_lag);
    for lag in 1..=max_lag {
        let shifted = input.slice(MonthRange::new(
            range.start.add_months(-(lag as i64)),
            range.end.add_months(-(lag as i64)),
        )?)?;
        let p = shifted.values();
        let signals = signal_values(p);
        let curve = TimeSeries::new(
            start,
            cumsum(moves.iter().zip(&signals).map(|(d, s)| *s as f64 * d)),
        )?;
        let a = actual.values();
        let n = a.len() as f64;
        rows.push(LagRow {
            lag,
            efficiency_pct: efficiency_of(&moves, &signals)?,
            hit_pct: hit_pct_of(&moves, &signals),
            sharpe: sharpe_of(&moves, &signals)?,
            rmse: (a.iter().zip(p).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n).sqrt(),
            mean_error: a.iter().zip(p).map(|(x, y)| (x - y).abs()).sum::<f64>() / n,
            final_equity: *curve.values().last().expect("non-empty"),
        });
        strategy_curves.push(curve);
    }
    let chosen_lag = rows
        .iter()
        .fold(None::<&LagRow>, |best, r| match best {
            Some(b) if !better(r, b) => Some(b),
            _ => Some(r),
        })
        .expect("max_lag >= 1")
        .lag;
    Ok(LagScanResult {
        range,
        rows,
        chosen_lag,
        strategy_curves,
        perfect,
        buy_hold,
    })
}

/// [`scan`] applied to every input, keyed in input order.
pub fn scan_all(
    inputs: &SeriesMap,
    target: &TimeSeries,
    max_lag: usize,
    range: MonthRange,
) -> Result<IndexMap<String, LagScanResult>> {
    inputs
        .iter()
        .map(|(name, s)| {
            let r = scan(s, target, max_lag, range).map_err(|e| match e {
                Error::InsufficientHistory {
                    short_by,
                    first_needed,
                    ..
                } => Error::InsufficientHistory {
                    feature: format!("{name}@lag{max_lag}"),
                    short_by,
                    first_needed,
                },
                other => other,
            })?;
            Ok((name.clone(), r))
        })
        .collect()
}
