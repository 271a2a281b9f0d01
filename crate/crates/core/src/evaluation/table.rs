//! Prediction tables and their CSV form.
//!
//! Columns: `index, source, nu_tls, g, t1_tls, tphi_tls` in raw units, with
//! an empty cell for a component the source does not predict. Optional
//! columns `nu_tls_norm, g_norm, t1_tls_norm, tphi_tls_norm` carry the same
//! values on the [1, 10] scale; when present they must agree with the raw
//! columns under the bounds used for evaluation.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Bounds, PARAMETERS};
use crate::error::{Error, Result};
use crate::estimator::EstimateRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Cnn,
    Analytic,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Cnn => "cnn",
            Source::Analytic => "analytic",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cnn" => Ok(Source::Cnn),
            "analytic" => Ok(Source::Analytic),
            other => Err(format!("unknown source '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub index: usize,
    pub source: Source,
    /// Raw-unit predictions [ν_TLS, g, T1_TLS, Tφ_TLS]; `None` = not predicted.
    pub q: [Option<f64>; 4],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PredictionTable {
    pub rows: Vec<PredictionRow>,
    /// Bounds the normalized columns refer to, if any.
    pub bounds: Option<Bounds>,
}

/// Normalized values must match the raw ones to this relative precision.
const NORM_CONSISTENCY_TOL: f64 = 1e-6;

fn norm_column(name: &str) -> String {
    format!("{name}_norm")
}

fn parse_cell(path: &Path, line: u64, column: &str, cell: &str) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|e| Error::parse(path, format!("line {line}, column {column}: {e}")))
}

impl PredictionTable {
    /// Components with at least one prediction.
    pub fn present(&self) -> [bool; 4] {
        std::array::from_fn(|c| self.rows.iter().any(|r| r.q[c].is_some()))
    }

    /// Sample indices covered by the table.
    pub fn indices(&self) -> BTreeSet<usize> {
        self.rows.iter().map(|r| r.index).collect()
    }

    /// Valid analytic estimates as predictions of ν_TLS and g.
    pub fn from_estimates(records: &[EstimateRecord]) -> Self {
        let rows = records
            .iter()
            .filter(|r| r.valid)
            .map(|r| PredictionRow { index: r.index, source: Source::Analytic, q: [r.nu_tls_hat, r.g_hat, None, None] })
            .collect();
        Self { rows, bounds: None }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))?;
        let mut header = vec!["index".to_string(), "source".to_string()];
        header.extend(PARAMETERS.iter().map(|p| p.to_string()));
        if self.bounds.is_some() {
            header.extend(PARAMETERS.iter().map(|p| norm_column(p)));
        }
        w.write_record(&header).map_err(|e| Error::parse(path, e))?;
        for row in &self.rows {
            let mut cells = vec![row.index.to_string(), row.source.to_string()];
            cells.extend(row.q.iter().map(|v| v.map(format_value).unwrap_or_default()));
            if let Some(b) = &self.bounds {
                cells.extend(
                    row.q.iter().enumerate().map(|(c, v)| {
                        v.map(|v| format_value(b.normalize_component(c, v))).unwrap_or_default()
                    }),
                );
            }
            w.write_record(&cells).map_err(|e| Error::parse(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a predictions CSV. Normalized columns, when present, are checked
    /// against `bounds`.
    pub fn read_csv(path: &Path, bounds: Option<&Bounds>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
        let headers = r.headers().map_err(|e| Error::parse(path, e))?.clone();
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);
        let missing = |name: &str| Error::parse(path, format!("missing column '{name}'"));
        let index_col = find("index").ok_or_else(|| missing("index"))?;
        let source_col = find("source").ok_or_else(|| missing("source"))?;
        let mut value_cols = [0usize; 4];
        for (c, name) in PARAMETERS.iter().enumerate() {
            value_cols[c] = find(name).ok_or_else(|| missing(name))?;
        }
        let norm_cols: [Option<usize>; 4] = std::array::from_fn(|c| find(&norm_column(PARAMETERS[c])));

        let mut rows = Vec::new();
        for (n, record) in r.records().enumerate() {
            let line = n as u64 + 2;
            let record = record.map_err(|e| Error::parse(path, e))?;
            let cell = |i: usize| record.get(i).unwrap_or("");
            let index = cell(index_col)
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::parse(path, format!("line {line}, index: {e}")))?;
            let source = cell(source_col).trim().parse::<Source>().map_err(|e| Error::parse(path, e))?;
            let mut q = [None; 4];
            for c in 0..4 {
                q[c] = parse_cell(path, line, PARAMETERS[c], cell(value_cols[c]))?;
                let norm = match norm_cols[c] {
                    Some(col) => parse_cell(path, line, PARAMETERS[c], cell(col))?,
                    None => None,
                };
                if let (Some(raw), Some(norm), Some(b)) = (q[c], norm, bounds) {
                    let expected = b.normalize_component(c, raw);
                    if (expected - norm).abs() > NORM_CONSISTENCY_TOL * expected.abs().max(1.0) {
                        return Err(Error::parse(
                            path,
                            format!(
                                "line {line}: {} normalized as {norm} but the training-split bounds give {expected}",
                                PARAMETERS[c]
                            ),
                        ));
                    }
                }
            }
            rows.push(PredictionRow { index, source, q });
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = rows.iter().find(|r| !seen.insert(r.index)) {
            return Err(Error::parse(path, format!("sample {} appears more than once", dup.index)));
        }
        Ok(Self { rows, bounds: bounds.copied() })
    }
}

/// Decimal text with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}
