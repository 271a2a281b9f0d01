//! Metrics for comparing predictions with labels: normalization onto the
//! [1, 10] scale, per-parameter MSE, error trends against detuning and
//! exports for plotting.

mod detuning;
mod metrics;
mod normalize;
mod report;
mod scatter;
mod table;

pub use detuning::{error_points, error_vs_detuning, DetuningBin, DetuningReport, ErrorPoint};
pub use metrics::{mse, Labels, MseReport, Scale};
pub use normalize::{normalize_labels, Bounds};
pub use report::{render_table, ModelColumn};
pub use scatter::scatter_export;
pub use table::{format_value, PredictionRow, PredictionTable, Source};

use crate::dataset::DatasetManifest;

/// [ν_TLS (GHz), g (GHz), T1_TLS (ns), Tφ_TLS (ns)]
pub type Targets = [f64; 4];

/// CSV column names of the four targets.
pub const PARAMETERS: [&str; 4] = ["nu_tls", "g", "t1_tls", "tphi_tls"];
pub const DISPLAY_NAMES: [&str; 4] = ["ω_TLS", "g", "T1_TLS", "Tφ_TLS"];

/// Labels of every sample in the manifest.
pub fn labels_from_manifest(manifest: &DatasetManifest) -> Labels {
    manifest.records.iter().map(|r| (r.index, r.label.q)).collect()
}
