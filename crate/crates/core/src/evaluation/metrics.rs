use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Bounds, PredictionTable, Targets};
use crate::error::{Error, Result};

/// Ground-truth targets by sample index.
pub type Labels = BTreeMap<usize, Targets>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Raw,
    Normalized,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Raw => "raw",
            Scale::Normalized => "normalized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub scale: Scale,
    /// Mean squared error per component; `None` where nothing was predicted.
    pub per_parameter: [Option<f64>; 4],
    pub counts: [usize; 4],
    /// Mean over all squared component errors that were predicted. With all
    /// four components on every row this is L = 1/(4N) Σ‖q − q̂‖².
    pub combined: Option<f64>,
}

impl MseReport {
    pub fn is_complete(&self) -> bool {
        self.per_parameter.iter().all(Option::is_some)
    }
}

/// Per-parameter MSE and combined loss of `pred` against `labels` on the
/// requested scale. Every predicted index must have a label.
pub fn mse(pred: &PredictionTable, labels: &Labels, scale: Scale, bounds: Option<&Bounds>) -> Result<MseReport> {
    let bounds = match (scale, bounds) {
        (Scale::Normalized, None) => {
            return Err(Error::InvalidParams("normalized MSE needs normalization bounds".into()));
        }
        (_, b) => b,
    };
    // Summing in index order keeps the result independent of row order.
    let mut rows: Vec<_> = pred.rows.iter().collect();
    rows.sort_by_key(|r| r.index);

    let mut sums = [0.0; 4];
    let mut counts = [0usize; 4];
    for row in rows {
        let truth = labels
            .get(&row.index)
            .ok_or_else(|| Error::IndexMismatch(format!("sample {} has no label", row.index)))?;
        for c in 0..4 {
            let Some(p) = row.q[c] else { continue };
            let (p, t) = match (scale, bounds) {
                (Scale::Normalized, Some(b)) => (b.normalize_component(c, p), b.normalize_component(c, truth[c])),
                _ => (p, truth[c]),
            };
            sums[c] += (p - t) * (p - t);
            counts[c] += 1;
        }
    }
    let per_parameter = std::array::from_fn(|c| (counts[c] > 0).then(|| sums[c] / counts[c] as f64));
    let total: usize = counts.iter().sum();
    let combined = (total > 0).then(|| sums.iter().sum::<f64>() / total as f64);
    Ok(MseReport { scale, per_parameter, counts, combined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{PredictionRow, Source};
    use proptest::prelude::*;

    fn row(index: usize, q: Targets) -> PredictionRow {
        PredictionRow { index, source: Source::Cnn, q: q.map(Some) }
    }

    #[test]
    fn perfect_prediction_is_zero() {
        let labels: Labels = [(0, [7.0, 0.02, 1000.0, 2000.0]), (1, [6.9, 0.01, 600.0, 900.0])].into();
        let pred = PredictionTable { rows: labels.iter().map(|(&i, &q)| row(i, q)).collect(), bounds: None };
        let r = mse(&pred, &labels, Scale::Raw, None).unwrap();
        assert_eq!(r.per_parameter, [Some(0.0); 4]);
        assert_eq!(r.combined, Some(0.0));
    }

    #[test]
    fn unit_errors() {
        let labels: Labels = [(4, [1.0, 2.0, 3.0, 4.0])].into();
        let pred = PredictionTable { rows: vec![row(4, [2.0, 3.0, 4.0, 5.0])], bounds: None };
        let r = mse(&pred, &labels, Scale::Raw, None).unwrap();
        assert_eq!(r.per_parameter, [Some(1.0); 4]);
        assert_eq!(r.combined, Some(1.0));
    }

    #[test]
    fn normalized_scale_uses_bounds() {
        let b = Bounds::new([0.0; 4], [9.0; 4]).unwrap();
        let labels: Labels = [(0, [0.0; 4])].into();
        let pred = PredictionTable { rows: vec![row(0, [1.0, 2.0, 0.0, 0.0])], bounds: None };
        let r = mse(&pred, &labels, Scale::Normalized, Some(&b)).unwrap();
        assert_eq!(r.per_parameter, [Some(1.0), Some(4.0), Some(0.0), Some(0.0)]);
        assert!(mse(&pred, &labels, Scale::Normalized, None).is_err());
    }

    #[test]
    fn partial_predictions() {
        let labels: Labels = [(0, [7.0, 0.02, 1000.0, 2000.0])].into();
        let pred = PredictionTable {
            rows: vec![PredictionRow { index: 0, source: Source::Analytic, q: [Some(7.1), Some(0.02), None, None] }],
            bounds: None,
        };
        let r = mse(&pred, &labels, Scale::Raw, None).unwrap();
        assert_eq!(r.per_parameter[2], None);
        assert_eq!(r.counts, [1, 1, 0, 0]);
        assert!(!r.is_complete());
        assert!((r.combined.unwrap() - 0.005).abs() < 1e-15);
    }

    #[test]
    fn unknown_index() {
        let labels: Labels = [(0, [0.0; 4])].into();
        let pred = PredictionTable { rows: vec![row(9, [0.0; 4])], bounds: None };
        assert!(matches!(mse(&pred, &labels, Scale::Raw, None), Err(Error::IndexMismatch(_))));
    }

    proptest! {
        #[test]
        fn combined_is_mean_of_parts_and_order_free(
            errs in prop::collection::vec(prop::array::uniform4(-5.0f64..5.0), 1..40),
            seed in any::<u64>(),
        ) {
            let labels: Labels = (0..errs.len()).map(|i| (i, [i as f64; 4])).collect();
            let mut rows: Vec<_> = errs.iter().enumerate().map(|(i, e)| row(i, std::array::from_fn(|c| i as f64 + e[c]))).collect();
            let a = mse(&PredictionTable { rows: rows.clone(), bounds: None }, &labels, Scale::Raw, None).unwrap();
            let mean = a.per_parameter.iter().map(|v| v.unwrap()).sum::<f64>() / 4.0;
            prop_assert!((a.combined.unwrap() - mean).abs() <= 1e-12 * mean.max(1e-300));
            let k = (seed as usize) % rows.len();
            rows.rotate_left(k);
            rows.reverse();
            let b = mse(&PredictionTable { rows, bounds: None }, &labels, Scale::Raw, None).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
