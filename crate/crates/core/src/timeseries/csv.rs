//! `date,<name>,...` CSV dialect with `YYYY-MM` dates and contiguous months.

use super::{MonthStamp, SeriesMap, TimeSeries};
use crate::error::{Error, Result};
use std::io::Read;

fn csv_err(row: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        row,
        column,
        message: message.into(),
    }
}

/// Parses a monthly CSV into one series per column.
///
/// Rows and columns in errors are 1-based; the header is row 1.
pub fn parse_csv<R: Read>(reader: R) -> Result<SeriesMap> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_err(1, 0, e.to_string()))?,
        None => return Err(csv_err(1, 0, "empty input")),
    };
    if header.get(0) != Some("date") {
        return Err(csv_err(1, 1, "first header cell must be `date`"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if names.is_empty() {
        return Err(csv_err(1, 2, "no value columns"));
    }
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(csv_err(1, i + 2, "empty column name"));
        }
        if names[..i].contains(name) {
            return Err(csv_err(1, i + 2, format!("duplicate column name `{name}`")));
        }
    }

    let mut start: Option<MonthStamp> = None;
    let mut prev: Option<MonthStamp> = None;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for rec in records {
        let rec = rec.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            csv_err(row, 0, e.to_string())
        })?;
        let row = rec.position().map_or(0, |p| p.line());
        if rec.len() != names.len() + 1 {
            return Err(csv_err(
                row,
                rec.len().min(names.len() + 1),
                format!("expected {} cells, found {}", names.len() + 1, rec.len()),
            ));
        }
        let date: MonthStamp = rec[0]
            .parse()
            .map_err(|_| csv_err(row, 1, format!("malformed date `{}`", &rec[0])))?;
        if let Some(p) = prev {
            if date != p.succ() {
                return Err(csv_err(
                    row,
                    1,
                    format!("non-contiguous month: expected {}, found {date}", p.succ()),
                ));
            }
        } else {
            start = Some(date);
        }
        prev = Some(date);
        for (j, col) in columns.iter_mut().enumerate() {
            let cell = &rec[j + 1];
            if cell.is_empty() {
                return Err(csv_err(row, j + 2, "empty cell"));
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| csv_err(row, j + 2, format!("non-numeric cell `{cell}`")))?;
            if !v.is_finite() {
                return Err(csv_err(row, j + 2, format!("non-finite cell `{cell}`")));
            }
            col.push(v);
        }
    }

    let start = start.ok_or_else(|| csv_err(2, 0, "no data rows"))?;
    names
        .into_iter()
        .zip(columns)
        .map(|(name, values)| Ok((name, TimeSeries::new(start, values)?)))
        .collect()
}

/// Rounds to six significant digits and prints the shortest decimal that
/// reads back to the same `f64`.
pub fn format_sig6(v: f64) -> String {
    let q = quantize_sig6(v);
    if q == 0.0 {
        "0".to_string()
    } else {
        format!("{q}")
    }
}

pub(crate) fn quantize_sig6(v: f64) -> f64 {
    format!("{v:.5e}").parse().unwrap_or(v)
}

/// Renders series sharing a start and length in the dialect read by [`parse_csv`].
pub fn render_csv(series: &SeriesMap) -> Result<String> {
    let (_, first) = series
        .first()
        .ok_or_else(|| Error::invalid("nothing to render"))?;
    for (name, s) in series {
        if s.start() != first.start() || s.len() != first.len() {
            return Err(Error::Misaligned(format!(
                "`{name}` spans {}, expected {}",
                s.range(),
                first.range()
            )));
        }
    }
    let mut out = String::from("date");
    for name in series.keys() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..first.len() {
        out.push_str(&first.date_at(i).to_string());
        for s in series.values() {
            out.push(',');
            out.push_str(&format_sig6(s.values()[i]));
        }
        out.push('\n');
    }
    Ok(out)
}
