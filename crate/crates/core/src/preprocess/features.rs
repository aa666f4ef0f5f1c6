use super::{ewma, lag, Transform};
use crate::error::{Error, Result};
use crate::timeseries::{MonthRange, MonthStamp, SeriesMap, TimeSeries};
use serde::{Deserialize, Serialize};

/// One input column: `lag(transform(ewma(source, beta)), lag)`, where the
/// exponential pre-smoothing is skipped when `beta` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub source: String,
    #[serde(default = "identity")]
    pub transform: Transform,
    #[serde(default)]
    pub lag: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

fn identity() -> Transform {
    Transform::Identity
}

impl FeatureSpec {
    pub fn new(source: impl Into<String>, transform: Transform, lag: usize) -> Self {
        Self {
            source: source.into(),
            transform,
            lag,
            beta: None,
        }
    }

    pub fn raw(source: impl Into<String>, lag: usize) -> Self {
        Self::new(source, Transform::Identity, lag)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn label(&self) -> String {
        let inner = match self.beta {
            Some(b) => format!("ewma{b}({})", self.source),
            None => self.source.clone(),
        };
        let body = match self.transform {
            Transform::Identity => inner,
            t => format!("{}({inner})", t.label()),
        };
        if self.lag > 0 {
            format!("{body}@lag{}", self.lag)
        } else {
            body
        }
    }

    /// Months of history consumed before the first defined value.
    pub fn warmup(&self) -> usize {
        self.transform.warmup() + self.lag
    }

    pub fn validate(&self) -> Result<()> {
        self.transform.validate()?;
        if let Some(b) = self.beta {
            Transform::Ewma { beta: b }.validate()?;
        }
        Ok(())
    }

    pub fn compute(&self, sources: &SeriesMap) -> Result<TimeSeries> {
        self.validate()?;
        let src = sources
            .get(&self.source)
            .ok_or_else(|| Error::UnknownSeries(self.source.clone()))?;
        let smoothed = match self.beta {
            Some(b) => ewma(src, b)?,
            None => src.clone(),
        };
        let too_short = |e| match e {
            Error::TooShort { .. } => Error::InsufficientHistory {
                feature: self.label(),
                short_by: (self.warmup() + 1).saturating_sub(src.len()) as i64,
                first_needed: src.start(),
            },
            other => other,
        };
        let transformed = self.transform.apply(&smoothed).map_err(too_short)?;
        lag(&transformed, self.lag).map_err(too_short)
    }
}

/// Aligned design matrix: one row per month, one column per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    features: Vec<FeatureSpec>,
    range: MonthRange,
    rows: Vec<Vec<f64>>,
    target: Option<Vec<f64>>,
}

impl FeatureMatrix {
    /// Builds a matrix from explicit rows; `rows.len()` must equal `range.len()`.
    pub fn from_rows(
        features: Vec<FeatureSpec>,
        range: MonthRange,
        rows: Vec<Vec<f64>>,
        target: Option<Vec<f64>>,
    ) -> Result<Self> {
        if rows.len() != range.len() {
            return Err(Error::Dimension {
                expected: range.len(),
                got: rows.len(),
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != features.len()) {
            return Err(Error::Dimension {
                expected: features.len(),
                got: r.len(),
            });
        }
        if let Some(t) = &target {
            if t.len() != rows.len() {
                return Err(Error::Dimension {
                    expected: rows.len(),
                    got: t.len(),
                });
            }
        }
        Ok(Self {
            features,
            range,
            rows,
            target,
        })
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn range(&self) -> MonthRange {
        self.range
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.features.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row_dates(&self) -> impl Iterator<Item = MonthStamp> {
        self.range.months()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn has_target(&self) -> bool {
        self.target.is_some()
    }

    pub fn target(&self) -> Result<&[f64]> {
        self.target
            .as_deref()
            .ok_or_else(|| Error::invalid("feature matrix has no target column"))
    }

    pub fn target_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.range.start, self.target()?.to_vec())
    }

    /// Sub-matrix over `range`, which must lie within this matrix.
    pub fn slice(&self, range: MonthRange) -> Result<FeatureMatrix> {
        if !(self.range.contains(range.start) && self.range.contains(range.end)) {
            return Err(Error::Misaligned(format!(
                "range {range} outside matrix range {}",
                self.range
            )));
        }
        let a = self.range.start.months_until(range.start) as usize;
        let b = a + range.len();
        Ok(FeatureMatrix {
            features: self.features.clone(),
            range,
            rows: self.rows[a..b].to_vec(),
            target: self.target.as_ref().map(|t| t[a..b].to_vec()),
        })
    }
}

fn covering_slice(series: &TimeSeries, range: MonthRange, feature: &str) -> Result<Vec<f64>> {
    if series.start() > range.start {
        return Err(Error::InsufficientHistory {
            feature: feature.to_string(),
            short_by: range.start.months_until(series.start()),
            first_needed: range.start,
        });
    }
    if series.end() < range.end {
        return Err(Error::Misaligned(format!(
            "`{feature}` ends {} before range end {}",
            series.end(),
            range.end
        )));
    }
    Ok(series.slice(range)?.into_values())
}

/// Assembles feature columns without a target (for prediction).
pub fn assemble_inputs(
    features: &[FeatureSpec],
    sources: &SeriesMap,
    range: MonthRange,
) -> Result<FeatureMatrix> {
    let columns = features
        .iter()
        .map(|f| covering_slice(&f.compute(sources)?, range, &f.label()))
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..range.len())
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    FeatureMatrix::from_rows(features.to_vec(), range, rows, None)
}

/// Assembles features and the (transformed) target over `range`.
///
/// Fails with [`Error::InsufficientHistory`] naming the first feature whose
/// warm-up is not covered by the source data.
pub fn assemble(
    features: &[FeatureSpec],
    sources: &SeriesMap,
    target_name: &str,
    target_transform: Transform,
    range: MonthRange,
) -> Result<FeatureMatrix> {
    let mut m = assemble_inputs(features, sources, range)?;
    let target_spec = FeatureSpec::new(target_name, target_transform, 0);
    m.target = Some(covering_slice(
        &target_spec.compute(sources)?,
        range,
        &target_spec.label(),
    )?);
    Ok(m)
}
