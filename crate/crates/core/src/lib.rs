//! Simulation and analysis toolkit for two-tone spectroscopy of a transmon
//! coupled to a single two-level system (TLS).
//!
//! * [`quantum`]: truncated qubit ⊗ TLS operators, Hamiltonian, Lindblad
//!   generator and time evolution.
//! * [`spectroscopy`]: the pulse-A / pulse-B protocol producing
//!   population maps over drive frequency and pulse length, plus noise.
//! * [`dataset`]: parameter sampling, bulk generation and the on-disk format.
//! * [`estimator`]: contrast-profile peak picking, damped-cosine fitting and
//!   closed-form recovery of the TLS frequency and coupling.
//! * [`evaluation`]: label normalization, MSE metrics and reports.

pub mod dataset;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod params;
pub mod quantum;
pub mod spectroscopy;
pub mod stats;

pub use dataset::{DatasetManifest, GenerationConfig, MapFile, NoiseMode};
pub use error::{Error, Result};
pub use estimator::{EstimateResult, EstimatorConfig, FitResult};
pub use evaluation::{Bounds, PredictionTable};
pub use params::{ParamRanges, Range, Rates, SystemParams, TWO_PI};
pub use quantum::{DensityMatrix, DressedFrequencies, Method, Operator};
pub use spectroscopy::{Grid, ProtocolConfig, SpectroscopyMap};
