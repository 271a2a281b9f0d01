use std::path::Path;

use super::{format_value, Bounds, Labels, PredictionTable, Scale, PARAMETERS};
use crate::error::{Error, Result};

/// Writes `index, parameter, target, prediction, scale`, one row per
/// predicted component, in index order.
pub fn scatter_export(
    pred: &PredictionTable,
    labels: &Labels,
    scale: Scale,
    bounds: Option<&Bounds>,
    path: &Path,
) -> Result<usize> {
    if scale == Scale::Normalized && bounds.is_none() {
        return Err(Error::InvalidParams("normalized export needs normalization bounds".into()));
    }
    let mut rows: Vec<_> = pred.rows.iter().collect();
    rows.sort_by_key(|r| r.index);
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))?;
    w.write_record(["index", "parameter", "target", "prediction", "scale"]).map_err(|e| Error::parse(path, e))?;
    let mut written = 0;
    for row in rows {
        let truth = labels
            .get(&row.index)
            .ok_or_else(|| Error::IndexMismatch(format!("sample {} has no label", row.index)))?;
        for c in 0..4 {
            let Some(p) = row.q[c] else { continue };
            let (t, p) = match (scale, bounds) {
                (Scale::Normalized, Some(b)) => (b.normalize_component(c, truth[c]), b.normalize_component(c, p)),
                _ => (truth[c], p),
            };
            w.write_record([row.index.to_string(), PARAMETERS[c].to_string(), format_value(t), format_value(p), scale.to_string()])
                .map_err(|e| Error::parse(path, e))?;
            written += 1;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{PredictionRow, Source};

    fn setup() -> (PredictionTable, Labels) {
        let labels: Labels = (0..5).map(|i| (i, [7.0 + 0.01 * i as f64, 0.1 / 3.0, 1234.567, 1.0 / 7.0])).collect();
        let rows = labels.iter().map(|(&i, q)| PredictionRow { index: i, source: Source::Cnn, q: q.map(Some) }).collect();
        (PredictionTable { rows, bounds: None }, labels)
    }

    #[test]
    fn identity_rows_roundtrip_exactly() {
        let (pred, labels) = setup();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        assert_eq!(scatter_export(&pred, &labels, Scale::Raw, None, &path).unwrap(), 20);
        let mut r = csv::Reader::from_path(&path).unwrap();
        let mut n = 0;
        for rec in r.records() {
            let rec = rec.unwrap();
            let index: usize = rec[0].parse().unwrap();
            let c = PARAMETERS.iter().position(|p| *p == &rec[1]).unwrap();
            let target: f64 = rec[2].parse().unwrap();
            let prediction: f64 = rec[3].parse().unwrap();
            assert_eq!(target, labels[&index][c]);
            assert_eq!(target, prediction);
            assert_eq!(&rec[4], "raw");
            n += 1;
        }
        assert_eq!(n, 20);
    }

    #[test]
    fn absent_components_are_skipped() {
        let (mut pred, labels) = setup();
        for row in &mut pred.rows {
            row.q[2] = None;
            row.q[3] = None;
        }
        let dir = tempfile::tempdir().unwrap();
        let b = Bounds::new([6.0, 0.0, 0.0, 0.0], [8.0, 1.0, 2000.0, 1.0]).unwrap();
        let n = scatter_export(&pred, &labels, Scale::Normalized, Some(&b), &dir.path().join("s.csv")).unwrap();
        assert_eq!(n, 10);
    }
}
