use std::fmt::Write;

use tls_spectro::evaluation::{labels_from_manifest, mse, Scale};
use tls_spectro::{Bounds, DatasetManifest, GenerationConfig, Grid, NoiseMode, PredictionTable, ProtocolConfig};

fn dataset(dir: &std::path::Path) -> DatasetManifest {
    let config = GenerationConfig {
        seed: 11,
        n: 8,
        splits: Some(tls_spectro::dataset::SplitSizes { train: 4, validation: 2, test: 2 }),
        noise: NoiseMode::Clean,
        protocol: ProtocolConfig {
            omega: Grid::new(6.9, 7.1, 5).unwrap(),
            time: Grid::new(0.0, 50.0, 3).unwrap(),
            ..ProtocolConfig::default()
        },
        ..GenerationConfig::default()
    };
    tls_spectro::dataset::generate_dataset(dir, &config, 1).unwrap()
}

/// A CNN predictions file as written by an external trainer: raw columns
/// plus normalized columns under the training-split bounds.
#[test]
fn external_predictions_file_is_scored() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dataset(dir.path());
    let bounds = Bounds::from_manifest(&manifest).unwrap();
    let labels = labels_from_manifest(&manifest);

    let mut csv = String::from("index,source,nu_tls,g,t1_tls,tphi_tls,nu_tls_norm,g_norm,t1_tls_norm,tphi_tls_norm\n");
    for (index, q) in &labels {
        let shifted = [q[0] + 1e-3, q[1], q[2] * 1.1, q[3]];
        let norm = bounds.normalize(&shifted);
        let cells: Vec<String> = shifted.iter().chain(&norm).map(|v| v.to_string()).collect();
        writeln!(csv, "{index},cnn,{}", cells.join(",")).unwrap();
    }
    let path = dir.path().join("cnn.csv");
    std::fs::write(&path, csv).unwrap();

    let table = PredictionTable::read_csv(&path, Some(&bounds)).unwrap();
    let raw = mse(&table, &labels, Scale::Raw, None).unwrap();
    assert!(raw.is_complete());
    assert!((raw.per_parameter[0].unwrap() - 1e-6).abs() < 1e-12);
    assert_eq!(raw.per_parameter[1], Some(0.0));
    let normalized = mse(&table, &labels, Scale::Normalized, Some(&bounds)).unwrap();
    assert!(normalized.per_parameter[3].unwrap() < 1e-24);
}

#[test]
fn normalized_columns_from_other_bounds_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dataset(dir.path());
    let bounds = Bounds::from_manifest(&manifest).unwrap();
    let labels = labels_from_manifest(&manifest);
    let wrong = Bounds::new([6.0, 0.0, 0.0, 0.0], [8.0, 1.0, 1e5, 1e5]).unwrap();

    let mut csv = String::from("index,source,nu_tls,g,t1_tls,tphi_tls,nu_tls_norm,g_norm,t1_tls_norm,tphi_tls_norm\n");
    for (index, q) in &labels {
        let cells: Vec<String> = q.iter().chain(&wrong.normalize(q)).map(|v| v.to_string()).collect();
        writeln!(csv, "{index},cnn,{}", cells.join(",")).unwrap();
    }
    let path = dir.path().join("cnn.csv");
    std::fs::write(&path, csv).unwrap();
    let err = PredictionTable::read_csv(&path, Some(&bounds)).unwrap_err().to_string();
    assert!(err.contains("training-split bounds"), "{err}");
}

#[test]
fn raw_only_file_with_absent_components() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dataset(dir.path());
    let labels = labels_from_manifest(&manifest);
    let mut csv = String::from("index,source,nu_tls,g,t1_tls,tphi_tls\n");
    for (index, q) in &labels {
        writeln!(csv, "{index},analytic,{},{},,", q[0], q[1]).unwrap();
    }
    let path = dir.path().join("analytic.csv");
    std::fs::write(&path, csv).unwrap();
    let table = PredictionTable::read_csv(&path, None).unwrap();
    assert_eq!(table.present(), [true, true, false, false]);
    let report = mse(&table, &labels, Scale::Raw, None).unwrap();
    assert!(!report.is_complete());
    assert_eq!(report.per_parameter[2], None);
}
