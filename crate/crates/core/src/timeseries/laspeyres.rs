use super::{SeriesMap, TimeSeries};
use crate::error::{Error, Result};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// Sector weights of the activity index (percentage points of GDP, base 1997).
/// They cover 80% of national value added.
pub const ACTIVITY_SECTORS: [(&str, f64); 11] = [
    ("oil", 20.9),
    ("mining", 0.8),
    ("private_manufacturing", 10.5),
    ("water_and_power", 1.5),
    ("construction", 5.2),
    ("commerce", 11.7),
    ("financial_insurance", 2.3),
    ("real_estate", 6.8),
    ("professional_services", 3.3),
    ("communal_services", 9.6),
    ("import_rights", 7.4),
];

/// Fixed base-period weights, each strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorWeights(IndexMap<String, f64>);

impl SectorWeights {
    pub fn new<I, S>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut map = IndexMap::new();
        for (name, w) in weights {
            let name = name.into();
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("weight of `{name}` must be > 0, got {w}")));
            }
            if map.insert(name.clone(), w).is_some() {
                return Err(Error::invalid(format!("duplicate sector `{name}`")));
            }
        }
        Ok(Self(map))
    }

    /// The built-in base-1997 table.
    pub fn standard() -> Self {
        Self::new(ACTIVITY_SECTORS).expect("built-in weights are positive")
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn get(&self, sector: &str) -> Option<f64> {
        self.0.get(sector).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|(k, &v)| (k.clone(), v * factor)))
    }
}

/// Fixed-weight (Laspeyres) quantity index:
/// `base_value * sum(w_a * rel_a[t]) / sum(w_a)`.
///
/// `relatives` holds quantity ratios against the base period, so an all-ones
/// period yields exactly `base_value`. Series not named in `weights` are ignored.
pub fn laspeyres_index(
    relatives: &SeriesMap,
    weights: &SectorWeights,
    base_value: f64,
) -> Result<TimeSeries> {
    if weights.is_empty() {
        return Err(Error::invalid("no sector weights"));
    }
    let total = weights.total();
    let mut columns = Vec::with_capacity(weights.len());
    for (sector, w) in weights.iter() {
        let s = relatives
            .get(sector)
            .ok_or_else(|| Error::UnknownSeries(sector.to_string()))?;
        columns.push((sector, w, s));
    }
    let (_, _, first) = columns[0];
    for &(sector, _, s) in &columns {
        if s.start() != first.start() || s.len() != first.len() {
            return Err(Error::Misaligned(format!(
                "sector `{sector}` spans {}, expected {}",
                s.range(),
                first.range()
            )));
        }
        if let Some((date, v)) = s.iter().find(|&(_, v)| v <= 0.0) {
            return Err(Error::invalid(format!(
                "relative of `{sector}` at {date} must be > 0, got {v}"
            )));
        }
    }
    let values = (0..first.len())
        .map(|t| {
            let weighted: f64 = columns.iter().map(|&(_, w, s)| w * s.values()[t]).sum();
            base_value * weighted / total
        })
        .collect();
    TimeSeries::new(first.start(), values)
}
