//! Per-sample estimate rows and the estimates CSV.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate, EstimateResult, EstimatorConfig, Hints, RejectReason};
use crate::dataset::DatasetManifest;
use crate::error::{Error, Result};

/// One CSV row: `index, valid, reject_reason, nu_tls_hat, g_hat,
/// nu_q_dressed, nu_tls_dressed, detuning_dressed, c1..c5, residual_rms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub index: usize,
    pub valid: bool,
    pub reject_reason: Option<RejectReason>,
    pub nu_tls_hat: Option<f64>,
    pub g_hat: Option<f64>,
    pub nu_q_dressed: Option<f64>,
    pub nu_tls_dressed: Option<f64>,
    pub detuning_dressed: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    pub residual_rms: Option<f64>,
}

impl EstimateRecord {
    pub fn new(index: usize, r: &EstimateResult) -> Self {
        let c = |i: usize| r.fit.map(|f| f.c[i]);
        Self {
            index,
            valid: r.valid,
            reject_reason: r.reject_reason,
            nu_tls_hat: r.nu_tls_hat,
            g_hat: r.g_hat,
            nu_q_dressed: r.nu_q_dressed_obs,
            nu_tls_dressed: r.nu_tls_dressed_obs,
            detuning_dressed: r.detuning_dressed_obs,
            c1: c(0),
            c2: c(1),
            c3: c(2),
            c4: c(3),
            c5: c(4),
            residual_rms: r.fit.map(|f| f.residual_rms),
        }
    }
}

pub fn write_estimates(path: &Path, records: &[EstimateRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))?;
    if records.is_empty() {
        // serde only emits the header with the first row.
        w.write_record([
            "index",
            "valid",
            "reject_reason",
            "nu_tls_hat",
            "g_hat",
            "nu_q_dressed",
            "nu_tls_dressed",
            "detuning_dressed",
            "c1",
            "c2",
            "c3",
            "c4",
            "c5",
            "residual_rms",
        ])
        .map_err(|e| Error::parse(path, e))?;
    }
    for r in records {
        w.serialize(r).map_err(|e| Error::parse(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_estimates(path: &Path) -> Result<Vec<EstimateRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| Error::parse(path, e))).collect()
}

/// Estimates every sample of a dataset, using the label frequencies as
/// hints and the recorded drive amplitude.
pub fn estimate_dataset(
    dir: &Path,
    manifest: &DatasetManifest,
    config: &EstimatorConfig,
    parallelism: usize,
) -> Result<Vec<EstimateRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    pool.install(|| {
        manifest
            .records
            .par_iter()
            .map(|record| {
                let map = manifest.load_map(dir, record)?;
                let hints = Hints { nu_q: record.nu_q, nu_tls: record.label.q[0] };
                let result = estimate(&map, hints, record.label.nuisance.drive, config);
                Ok(EstimateRecord::new(record.index, &result))
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        let rows = vec![
            EstimateRecord {
                index: 0,
                valid: true,
                reject_reason: None,
                nu_tls_hat: Some(7.012_345_678_901_234),
                g_hat: Some(0.1 + 0.2),
                nu_q_dressed: Some(6.99),
                nu_tls_dressed: Some(7.02),
                detuning_dressed: Some(0.03),
                c1: Some(0.5),
                c2: Some(0.25),
                c3: Some(1e-3),
                c4: Some(0.06),
                c5: Some(3.0),
                residual_rms: Some(1e-9),
            },
            EstimateRecord::new(1, &EstimateResult {
                nu_tls_hat: None,
                g_hat: None,
                nu_q_dressed_obs: None,
                nu_tls_dressed_obs: None,
                detuning_dressed_obs: None,
                fit: None,
                valid: false,
                reject_reason: Some(RejectReason::OutOfRange),
            }),
        ];
        write_estimates(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("index,valid,reject_reason,nu_tls_hat,g_hat,"));
        assert!(text.contains("1,false,out_of_range,,,"));
        assert_eq!(read_estimates(&path).unwrap(), rows);
    }

    #[test]
    fn empty_file_has_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_estimates(&path, &[]).unwrap();
        assert!(read_estimates(&path).unwrap().is_empty());
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("index,valid"));
    }
}
