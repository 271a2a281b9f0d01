use serde::{Deserialize, Serialize};

use super::Targets;
use crate::dataset::{DatasetManifest, Split};
use crate::error::{Error, Result};

/// Column-wise affine map of targets onto [1, 10].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Targets,
    pub max: Targets,
}

impl Bounds {
    pub fn new(min: Targets, max: Targets) -> Result<Self> {
        for column in 0..4 {
            if !(min[column].is_finite() && max[column].is_finite() && max[column] > min[column]) {
                return Err(Error::DegenerateColumn { column });
            }
        }
        Ok(Self { min, max })
    }

    /// Per-column minimum and maximum of `rows`.
    pub fn from_rows(rows: &[Targets]) -> Result<Self> {
        let mut min = [f64::INFINITY; 4];
        let mut max = [f64::NEG_INFINITY; 4];
        for row in rows {
            for c in 0..4 {
                min[c] = min[c].min(row[c]);
                max[c] = max[c].max(row[c]);
            }
        }
        Self::new(min, max)
    }

    /// Bounds of the training labels. Falls back to the sampling ranges when
    /// the dataset has no training split.
    pub fn from_manifest(manifest: &DatasetManifest) -> Result<Self> {
        let train: Vec<Targets> = manifest.records_in(Split::Train).map(|r| r.label.q).collect();
        if train.len() >= 2 {
            return Self::from_rows(&train);
        }
        let ranges = manifest.config.ranges.target_ranges();
        Self::new(ranges.map(|r| r.lo), ranges.map(|r| r.hi))
    }

    pub fn normalize_component(&self, column: usize, q: f64) -> f64 {
        1.0 + 9.0 * (q - self.min[column]) / (self.max[column] - self.min[column])
    }

    pub fn denormalize_component(&self, column: usize, q: f64) -> f64 {
        self.min[column] + (q - 1.0) * (self.max[column] - self.min[column]) / 9.0
    }

    /// q ↦ 1 + 9·(q − q_min)/(q_max − q_min), unclamped.
    pub fn normalize(&self, q: &Targets) -> Targets {
        std::array::from_fn(|c| self.normalize_component(c, q[c]))
    }

    pub fn denormalize(&self, q: &Targets) -> Targets {
        std::array::from_fn(|c| self.denormalize_component(c, q[c]))
    }
}

/// Normalizes every row, computing bounds from `rows` when none are given.
pub fn normalize_labels(rows: &[Targets], bounds: Option<Bounds>) -> Result<(Vec<Targets>, Bounds)> {
    let bounds = match bounds {
        Some(b) => Bounds::new(b.min, b.max)?,
        None => Bounds::from_rows(rows)?,
    };
    Ok((rows.iter().map(|q| bounds.normalize(q)).collect(), bounds))
}
