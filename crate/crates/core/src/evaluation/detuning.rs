use serde::{Deserialize, Serialize};

use super::Labels;
use crate::error::{Error, Result};
use crate::estimator::EstimateRecord;
use crate::stats::{quantile, spearman};

/// Absolute estimation errors of one sample against its bare detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    /// |ν_TLS − ν_q|, GHz.
    pub detuning: f64,
    pub nu_error: f64,
    pub g_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub nu_median: Option<f64>,
    pub nu_p90: Option<f64>,
    pub g_median: Option<f64>,
    pub g_p90: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningReport {
    pub bins: Vec<DetuningBin>,
    /// Spearman correlation of |Δ| with the ν_TLS and g errors.
    pub spearman_nu: f64,
    pub spearman_g: f64,
}

/// Error points of the valid estimates. `nu_q` is the bare qubit frequency.
pub fn error_points(estimates: &[EstimateRecord], labels: &Labels, nu_q: f64) -> Result<Vec<ErrorPoint>> {
    estimates
        .iter()
        .filter(|e| e.valid)
        .map(|e| {
            let truth = labels
                .get(&e.index)
                .ok_or_else(|| Error::IndexMismatch(format!("sample {} has no label", e.index)))?;
            let (Some(nu), Some(g)) = (e.nu_tls_hat, e.g_hat) else {
                return Err(Error::Format(format!("valid estimate {} lacks values", e.index)));
            };
            Ok(ErrorPoint { detuning: (truth[0] - nu_q).abs(), nu_error: (nu - truth[0]).abs(), g_error: (g - truth[1]).abs() })
        })
        .collect()
}

/// Median and 90th-percentile errors in `n_bins` equal-width |Δ| bins.
pub fn error_vs_detuning(points: &[ErrorPoint], n_bins: usize) -> Result<DetuningReport> {
    if n_bins < 2 || points.len() < 2 {
        return Err(Error::InvalidParams("need at least two bins and two points".into()));
    }
    let lo = points.iter().map(|p| p.detuning).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.detuning).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / n_bins as f64;
    let bin_of = |d: f64| if width > 0.0 { (((d - lo) / width) as usize).min(n_bins - 1) } else { 0 };

    let mut members: Vec<Vec<&ErrorPoint>> = vec![Vec::new(); n_bins];
    for p in points {
        members[bin_of(p.detuning)].push(p);
    }
    if members.iter().filter(|m| !m.is_empty()).count() < 2 {
        return Err(Error::InvalidParams("fewer than two populated detuning bins".into()));
    }
    let stat = |m: &[&ErrorPoint], f: fn(&ErrorPoint) -> f64, q: f64| {
        (!m.is_empty()).then(|| quantile(&m.iter().map(|p| f(p)).collect::<Vec<_>>(), q))
    };
    let bins = members
        .iter()
        .enumerate()
        .map(|(b, m)| DetuningBin {
            lo: lo + width * b as f64,
            hi: if b + 1 == n_bins { hi } else { lo + width * (b + 1) as f64 },
            count: m.len(),
            nu_median: stat(m, |p| p.nu_error, 0.5),
            nu_p90: stat(m, |p| p.nu_error, 0.9),
            g_median: stat(m, |p| p.g_error, 0.5),
            g_p90: stat(m, |p| p.g_error, 0.9),
        })
        .collect();

    let d: Vec<f64> = points.iter().map(|p| p.detuning).collect();
    let nu: Vec<f64> = points.iter().map(|p| p.nu_error).collect();
    let g: Vec<f64> = points.iter().map(|p| p.g_error).collect();
    Ok(DetuningReport { bins, spearman_nu: spearman(&d, &nu), spearman_g: spearman(&d, &g) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(f: impl Fn(f64) -> f64) -> Vec<ErrorPoint> {
        (1..=100)
            .map(|i| {
                let d = 0.002 * i as f64;
                ErrorPoint { detuning: d, nu_error: f(d), g_error: f(d) }
            })
            .collect()
    }

    #[test]
    fn inverse_errors_decrease_per_bin() {
        let r = error_vs_detuning(&points(|d| 1e-3 / d), 5).unwrap();
        let medians: Vec<f64> = r.bins.iter().map(|b| b.g_median.unwrap()).collect();
        assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
        assert_eq!(r.bins.iter().map(|b| b.count).sum::<usize>(), 100);
        assert!((r.spearman_g + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_errors_are_uncorrelated() {
        let r = error_vs_detuning(&points(|_| 0.01), 4).unwrap();
        assert_eq!(r.spearman_nu, 0.0);
        assert_eq!(r.spearman_g, 0.0);
    }

    #[test]
    fn needs_two_populated_bins() {
        let single = vec![ErrorPoint { detuning: 0.1, nu_error: 0.0, g_error: 0.0 }; 5];
        assert!(error_vs_detuning(&single, 3).is_err());
    }
}
