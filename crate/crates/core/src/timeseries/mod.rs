//! Monthly time series, calendar arithmetic, CSV ingestion and the
//! synthetic-economy generator.

mod csv;
mod laspeyres;
mod synth;

pub use self::csv::{format_sig6, parse_csv, render_csv};
pub use laspeyres::{laspeyres_index, SectorWeights, ACTIVITY_SECTORS};
pub use synth::{
    synthesize_economy, synthesize_planted_pair, PlantedLead, PlantedPair, SyntheticBundle,
    PREDICTOR_LEADS, SYNTH_END, TARGET_NAME,
};

use crate::error::{Error, Result};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Named collection of series. Iteration order is insertion order (CSV column order).
pub type SeriesMap = IndexMap<String, TimeSeries>;

/// A calendar month. Ordering is lexicographic on `(year, month)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthStamp {
    year: i32,
    month: u8,
}

impl MonthStamp {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::MonthStamp(format!("{year:04}-{month:02}")));
        }
        Ok(Self {
            year,
            month: month as u8,
        })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month as u32
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Self {
            year: ord.div_euclid(12) as i32,
            month: (ord.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn succ(self) -> Self {
        self.add_months(1)
    }

    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `later`.
    pub fn months_until(self, later: MonthStamp) -> i64 {
        later.ordinal() - self.ordinal()
    }
}

impl fmt::Display for MonthStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthStamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MonthStamp(s.to_string());
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        MonthStamp::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for MonthStamp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthStamp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Inclusive range of months, `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "(MonthStamp, MonthStamp)", into = "(MonthStamp, MonthStamp)")]
pub struct MonthRange {
    pub start: MonthStamp,
    pub end: MonthStamp,
}

impl MonthRange {
    pub fn new(start: MonthStamp, end: MonthStamp) -> Result<Self> {
        if end < start {
            return Err(Error::invalid(format!("range end {end} precedes start {start}")));
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> usize {
        (self.start.months_until(self.end) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, m: MonthStamp) -> bool {
        self.start <= m && m <= self.end
    }

    pub fn months(&self) -> impl Iterator<Item = MonthStamp> {
        let start = self.start;
        (0..self.len() as i64).map(move |i| start.add_months(i))
    }

    /// Splits into a leading part of `first_len` months and the remainder.
    pub fn split_at(&self, first_len: usize) -> Result<(MonthRange, MonthRange)> {
        if first_len == 0 || first_len >= self.len() {
            return Err(Error::invalid(format!(
                "cannot split a {}-month range after {first_len} months",
                self.len()
            )));
        }
        let cut = self.start.add_months(first_len as i64);
        Ok((
            MonthRange::new(self.start, cut.add_months(-1))?,
            MonthRange::new(cut, self.end)?,
        ))
    }
}

impl TryFrom<(MonthStamp, MonthStamp)> for MonthRange {
    type Error = Error;
    fn try_from((start, end): (MonthStamp, MonthStamp)) -> Result<Self> {
        MonthRange::new(start, end)
    }
}

impl From<MonthRange> for (MonthStamp, MonthStamp) {
    fn from(r: MonthRange) -> Self {
        (r.start, r.end)
    }
}

impl fmt::Display for MonthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Contiguous monthly series: `values[i]` belongs to `start + i` months.
///
/// Non-empty and finite by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    start: MonthStamp,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start: MonthStamp, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("time series must be non-empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at {}",
                start.add_months(i as i64)
            )));
        }
        Ok(Self { start, values })
    }

    pub fn start(&self) -> MonthStamp {
        self.start
    }

    pub fn end(&self) -> MonthStamp {
        self.start.add_months(self.values.len() as i64 - 1)
    }

    pub fn range(&self) -> MonthRange {
        MonthRange {
            start: self.start,
            end: self.end(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn date_at(&self, i: usize) -> MonthStamp {
        self.start.add_months(i as i64)
    }

    pub fn index_of(&self, date: MonthStamp) -> Option<usize> {
        let i = self.start.months_until(date);
        (i >= 0 && (i as usize) < self.values.len()).then_some(i as usize)
    }

    pub fn get(&self, date: MonthStamp) -> Option<f64> {
        self.index_of(date).map(|i| self.values[i])
    }

    pub fn dates(&self) -> impl Iterator<Item = MonthStamp> + '_ {
        (0..self.values.len()).map(|i| self.date_at(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonthStamp, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.date_at(i), v))
    }

    /// Restricts the series to `range`, which must lie within the series.
    pub fn slice(&self, range: MonthRange) -> Result<TimeSeries> {
        match (self.index_of(range.start), self.index_of(range.end)) {
            (Some(a), Some(b)) => TimeSeries::new(range.start, self.values[a..=b].to_vec()),
            _ => Err(Error::Misaligned(format!(
                "range {range} not covered by series spanning {}",
                self.range()
            ))),
        }
    }

    /// Applies `f` to every value, keeping dates.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<TimeSeries> {
        TimeSeries::new(self.start, self.values.iter().map(|&v| f(v)).collect())
    }
}
