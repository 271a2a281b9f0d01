use crate::error::{Error, Result};
use crate::spectroscopy::SpectroscopyMap;

/// Per drive frequency: maximum over t_A minus mean over t_A.
pub fn contrast_profile(map: &SpectroscopyMap) -> Result<Vec<f64>> {
    let rows = map.rows();
    if rows < 2 {
        return Err(Error::InvalidParams(format!("contrast profile needs at least 2 time rows, got {rows}")));
    }
    let cols = map.cols();
    let mut max = vec![f64::NEG_INFINITY; cols];
    let mut sum = vec![0.0; cols];
    for r in 0..rows {
        for (c, &v) in map.row(r).iter().enumerate() {
            max[c] = max[c].max(v);
            sum[c] += v;
        }
    }
    Ok(max.iter().zip(&sum).map(|(m, s)| m - s / rows as f64).collect())
}
