//! Deterministic synthetic economy with planted leading indicators.
//!
//! A latent driver `D(t) = sin(2*pi*t/P + phase) + trend*t + u(t)` carries the
//! business cycle, where `u` is an AR(1) shock process scaled by `noise_scale`.
//! Sector quantity relatives are `exp(k_a * (D(t) - D(0) + noise))`, so the
//! aggregate index is strictly increasing in `D` when noise is zero. Each
//! predictor is `level * exp(0.1 * (D(t + lead) + noise))`: it leads the target
//! by exactly `lead` months. Every value is rounded to six significant digits,
//! which the CSV renderer reproduces exactly.

use super::csv::quantize_sig6;
use super::{laspeyres_index, MonthStamp, SectorWeights, SeriesMap, TimeSeries, ACTIVITY_SECTORS};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TARGET_NAME: &str = "igaem";

/// Last month of every synthetic bundle (the sample ends in December 2003).
pub const SYNTH_END: (i32, u32) = (2003, 12);

/// Predictors and the lead (months) planted for each.
pub const PREDICTOR_LEADS: [(&str, usize); 12] = [
    ("gwh", 10),
    ("ibc", 5),
    ("sp500", 5),
    ("crude", 7),
    ("tbills", 10),
    ("gold", 2),
    ("copper", 8),
    ("eurodollar", 10),
    ("crb", 12),
    ("dowjones", 3),
    ("loans_rate", 1),
    ("ipc", 9),
];

const PREDICTOR_LEVELS: [f64; 12] = [
    5000.0, 8000.0, 900.0, 22.0, 5.0, 350.0, 95.0, 5.5, 220.0, 280.0, 25.0, 2.5,
];

const MAX_LEAD: usize = 12;
const TREND_PER_YEAR: f64 = 0.1;
const SHOCK_PERSISTENCE: f64 = 0.6;
const PREDICTOR_SENSITIVITY: f64 = 0.1;
const BASE_VALUE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedLead {
    pub name: String,
    pub lead: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticBundle {
    pub seed: u64,
    pub cycle_period: usize,
    pub noise_scale: f64,
    /// Target index followed by the predictors, all sharing dates.
    pub series: SeriesMap,
    /// Sector quantity relatives the target was built from.
    #[serde(skip)]
    pub sectors: SeriesMap,
    pub planted: Vec<PlantedLead>,
}

fn end_month() -> MonthStamp {
    MonthStamp::new(SYNTH_END.0, SYNTH_END.1).expect("valid constant")
}

fn check_args(months: usize, cycle_period: usize, noise_scale: f64) -> Result<()> {
    if months < 24 {
        return Err(Error::invalid(format!("months must be >= 24, got {months}")));
    }
    if cycle_period < 2 {
        return Err(Error::invalid(format!(
            "cycle_period must be >= 2, got {cycle_period}"
        )));
    }
    if !(noise_scale.is_finite() && noise_scale >= 0.0) {
        return Err(Error::invalid(format!(
            "noise_scale must be >= 0, got {noise_scale}"
        )));
    }
    Ok(())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Latent driver over `len` months.
fn latent_driver(rng: &mut ChaCha8Rng, len: usize, cycle_period: usize, noise_scale: f64) -> Vec<f64> {
    let phase = rng.random_range(0.0..2.0 * PI);
    let mut shock = 0.0;
    (0..len)
        .map(|t| {
            if t > 0 {
                shock = SHOCK_PERSISTENCE * shock + noise_scale * normal(rng);
            }
            let tf = t as f64;
            (2.0 * PI * tf / cycle_period as f64 + phase).sin() + TREND_PER_YEAR * tf / 12.0 + shock
        })
        .collect()
}

/// Builds the synthetic bundle. Output ends in December 2003 and starts
/// `months - 1` months earlier.
pub fn synthesize_economy(
    seed: u64,
    months: usize,
    cycle_period: usize,
    noise_scale: f64,
) -> Result<SyntheticBundle> {
    check_args(months, cycle_period, noise_scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = end_month().add_months(-(months as i64 - 1));
    let driver = latent_driver(&mut rng, months + MAX_LEAD, cycle_period, noise_scale);

    // Aggregate surprise shared by all sectors, zero in the base period.
    let common: Vec<f64> = (0..months)
        .map(|t| if t == 0 { 0.0 } else { noise_scale * normal(&mut rng) })
        .collect();

    let mut sectors = SeriesMap::new();
    for (name, _) in ACTIVITY_SECTORS {
        let sensitivity = 0.08 * (0.6 + 0.8 * rng.random::<f64>());
        let values = (0..months)
            .map(|t| {
                let idio = if t == 0 { 0.0 } else { noise_scale * normal(&mut rng) };
                let x = driver[t] - driver[0] + common[t] + idio;
                quantize_sig6((sensitivity * x).exp())
            })
            .collect();
        sectors.insert(name.to_string(), TimeSeries::new(start, values)?);
    }
    let target = laspeyres_index(&sectors, &SectorWeights::standard(), BASE_VALUE)?
        .map(quantize_sig6)?;

    let mut series = SeriesMap::new();
    series.insert(TARGET_NAME.to_string(), target);
    let mut planted = Vec::with_capacity(PREDICTOR_LEADS.len());
    for ((name, lead), level) in PREDICTOR_LEADS.iter().zip(PREDICTOR_LEVELS) {
        let values = (0..months)
            .map(|t| {
                let x = driver[t + lead] + noise_scale * normal(&mut rng);
                quantize_sig6(level * (PREDICTOR_SENSITIVITY * x).exp())
            })
            .collect();
        series.insert(name.to_string(), TimeSeries::new(start, values)?);
        planted.push(PlantedLead {
            name: name.to_string(),
            lead: *lead,
        });
    }

    Ok(SyntheticBundle {
        seed,
        cycle_period,
        noise_scale,
        series,
        sectors,
        planted,
    })
}

/// A single leading input and a target that trails it by `lead` months.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedPair {
    pub input: TimeSeries,
    pub target: TimeSeries,
    pub lead: usize,
}

/// `target(t) = input(t - lead) + e(t)` with `e ~ N(0, (noise_scale * m)^2)`,
/// where `m` is the mean absolute monthly move of the input. The input is
/// `100 + 10 * D(t)` for the same latent driver as [`synthesize_economy`].
/// The target has `months` observations ending December 2003; the input
/// starts `lead` months earlier.
pub fn synthesize_planted_pair(
    seed: u64,
    months: usize,
    cycle_period: usize,
    noise_scale: f64,
    lead: usize,
) -> Result<PlantedPair> {
    check_args(months, cycle_period, noise_scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input: Vec<f64> = latent_driver(&mut rng, months + lead, cycle_period, noise_scale)
        .into_iter()
        .map(|d| 100.0 + 10.0 * d)
        .collect();
    let move_scale =
        input.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (input.len() - 1) as f64;
    let target = (0..months)
        .map(|t| input[t] + noise_scale * move_scale * normal(&mut rng))
        .collect();
    let end = end_month();
    Ok(PlantedPair {
        input: TimeSeries::new(end.add_months(-((months + lead) as i64 - 1)), input)?,
        target: TimeSeries::new(end.add_months(-(months as i64 - 1)), target)?,
        lead,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::{parse_csv, render_csv};

    #[test]
    fn shape_and_dates() {
        let b = synthesize_economy(1, 156, 12, 0.1).unwrap();
        assert_eq!(b.series.len(), 13);
        assert_eq!(b.series.get_index(0).unwrap().0, TARGET_NAME);
        for s in b.series.values() {
            assert_eq!(s.len(), 156);
            assert_eq!(s.start(), MonthStamp::new(1991, 1).unwrap());
            assert_eq!(s.end(), MonthStamp::new(2003, 12).unwrap());
        }
        assert_eq!(b.planted.len(), 12);
        assert_eq!(b.series[TARGET_NAME].values()[0], 100.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = synthesize_economy(7, 60, 12, 0.3).unwrap();
        let b = synthesize_economy(7, 60, 12, 0.3).unwrap();
        let c = synthesize_economy(8, 60, 12, 0.3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sectors, b.sectors);
        assert_ne!(a.series, c.series);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        for seed in [1, 2, 3] {
            let b = synthesize_economy(seed, 168, 12, 0.1).unwrap();
            let text = render_csv(&b.series).unwrap();
            assert_eq!(parse_csv(text.as_bytes()).unwrap(), b.series);
        }
    }

    #[test]
    fn preconditions() {
        assert!(synthesize_economy(1, 23, 12, 0.0).is_err());
        assert!(synthesize_economy(1, 24, 1, 0.0).is_err());
        assert!(synthesize_economy(1, 24, 12, -0.1).is_err());
        assert!(synthesize_planted_pair(1, 12, 12, 0.0, 3).is_err());
    }

    #[test]
    fn planted_pair_is_exact_without_noise() {
        let p = synthesize_planted_pair(3, 100, 12, 0.0, 7).unwrap();
        assert_eq!(p.input.len(), 107);
        assert_eq!(p.target.end(), p.input.end());
        for (date, v) in p.target.iter() {
            assert_eq!(p.input.get(date.add_months(-7)).unwrap(), v);
        }
    }
}
