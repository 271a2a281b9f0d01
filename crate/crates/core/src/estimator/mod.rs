//! Analytical recovery of the TLS frequency and coupling from a
//! spectroscopy map.
//!
//! The pipeline takes the contrast profile, picks the dressed qubit and TLS
//! peaks near label hints, fits a damped cosine to the map column at the
//! dressed TLS frequency and converts the fitted Rabi frequency Ω into
//! ĝ = Ω·|Δ̃|/A. The TLS frequency follows from the second-order shift g²/Δ̃.

mod contrast;
mod fit;
mod peaks;
mod records;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spectroscopy::SpectroscopyMap;

pub use contrast::contrast_profile;
pub use fit::{damped_cosine, fit_damped_cosine, FitError, FitResult};
pub use peaks::{pick_peaks, Peak, PeakError, PeakPicks};
pub use records::{estimate_dataset, read_estimates, write_estimates, EstimateRecord};

/// Half-width of the accepted TLS band around the qubit, GHz.
pub const VALIDITY_HALF_WIDTH: f64 = 0.2;
pub const DEFAULT_WINDOW: f64 = 0.02;

/// True iff `nu_tls` lies in [ν_q − 0.2, ν_q + 0.2] GHz.
pub fn validity_filter(nu_tls: f64, nu_q: f64) -> bool {
    (nu_q - VALIDITY_HALF_WIDTH..=nu_q + VALIDITY_HALF_WIDTH).contains(&nu_tls)
}

/// Sign convention for undoing the dispersive shift of the TLS line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSign {
    /// ν̂ = ν̃ − ĝ²/Δ̃: the coupled lines repel, so the bare TLS sits closer
    /// to the qubit than the observed one.
    #[default]
    Repulsion,
    /// ν̂ = ν̃ + ĝ²/Δ̃.
    Additive,
}

impl ShiftSign {
    pub fn apply(self, nu_tls_dressed: f64, g: f64, detuning_dressed: f64) -> f64 {
        let shift = g * g / detuning_dressed;
        match self {
            ShiftSign::Repulsion => nu_tls_dressed - shift,
            ShiftSign::Additive => nu_tls_dressed + shift,
        }
    }
}

impl FromStr for ShiftSign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "repulsion" => Ok(ShiftSign::Repulsion),
            "additive" => Ok(ShiftSign::Additive),
            other => Err(format!("unknown shift sign '{other}', expected repulsion or additive")),
        }
    }
}

/// Automatic rejection rules. Any field can be disabled by setting it to
/// `false` or zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Peak search half-width around each hint, GHz.
    pub window: f64,
    pub shift_sign: ShiftSign,
    /// Reject when c2 falls below this.
    pub min_amplitude: f64,
    /// Reject peaks sitting on the edge of their search window.
    pub reject_window_edge: bool,
    /// Reject fits covering less than one full oscillation period.
    pub require_full_period: bool,
    /// Reject when c2 < `min_snr` × residual_rms.
    pub min_snr: f64,
    /// Reject when ĝ/|Δ̃| exceeds this.
    pub max_coupling_ratio: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            window: DEFAULT_WINDOW,
            shift_sign: ShiftSign::Repulsion,
            min_amplitude: 1e-3,
            reject_window_edge: true,
            require_full_period: true,
            min_snr: 3.0,
            max_coupling_ratio: 0.3,
        }
    }
}

impl EstimatorConfig {
    /// Only the minimal rules: convergence, amplitude, collisions, range.
    pub fn minimal() -> Self {
        EstimatorConfig {
            reject_window_edge: false,
            require_full_period: false,
            min_snr: 0.0,
            max_coupling_ratio: f64::INFINITY,
            ..EstimatorConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    OutOfRange,
    EmptyWindow,
    PeaksCollide,
    WindowEdge,
    TooFewPoints,
    BadTimes,
    SingularJacobian,
    NotConverged,
    LowAmplitude,
    ShortWindow,
    LowSnr,
    NonPerturbative,
}

impl RejectReason {
    pub const ALL: [RejectReason; 12] = [
        RejectReason::OutOfRange,
        RejectReason::EmptyWindow,
        RejectReason::PeaksCollide,
        RejectReason::WindowEdge,
        RejectReason::TooFewPoints,
        RejectReason::BadTimes,
        RejectReason::SingularJacobian,
        RejectReason::NotConverged,
        RejectReason::LowAmplitude,
        RejectReason::ShortWindow,
        RejectReason::LowSnr,
        RejectReason::NonPerturbative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::OutOfRange => "out_of_range",
            RejectReason::EmptyWindow => "empty_window",
            RejectReason::PeaksCollide => "peaks_collide",
            RejectReason::WindowEdge => "window_edge",
            RejectReason::TooFewPoints => "too_few_points",
            RejectReason::BadTimes => "bad_times",
            RejectReason::SingularJacobian => "singular_jacobian",
            RejectReason::NotConverged => "not_converged",
            RejectReason::LowAmplitude => "low_amplitude",
            RejectReason::ShortWindow => "short_window",
            RejectReason::LowSnr => "low_snr",
            RejectReason::NonPerturbative => "non_perturbative",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RejectReason {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RejectReason::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown reject reason '{s}'"))
    }
}

impl From<PeakError> for RejectReason {
    fn from(e: PeakError) -> Self {
        match e {
            PeakError::EmptyWindow => RejectReason::EmptyWindow,
            PeakError::PeaksCollide => RejectReason::PeaksCollide,
        }
    }
}

impl From<FitError> for RejectReason {
    fn from(e: FitError) -> Self {
        match e {
            FitError::TooFewPoints => RejectReason::TooFewPoints,
            FitError::BadTimes => RejectReason::BadTimes,
            FitError::SingularJacobian => RejectReason::SingularJacobian,
        }
    }
}

/// Outcome of [`estimate`]. Fields are filled as far as the pipeline got, so
/// rejected samples still carry their peaks and fit for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub nu_tls_hat: Option<f64>,
    pub g_hat: Option<f64>,
    pub nu_q_dressed_obs: Option<f64>,
    pub nu_tls_dressed_obs: Option<f64>,
    pub detuning_dressed_obs: Option<f64>,
    pub fit: Option<FitResult>,
    pub valid: bool,
    pub reject_reason: Option<RejectReason>,
}

impl EstimateResult {
    fn empty() -> Self {
        EstimateResult {
            nu_tls_hat: None,
            g_hat: None,
            nu_q_dressed_obs: None,
            nu_tls_dressed_obs: None,
            detuning_dressed_obs: None,
            fit: None,
            valid: false,
            reject_reason: None,
        }
    }

    fn reject(mut self, reason: RejectReason) -> Self {
        self.valid = false;
        self.reject_reason = Some(reason);
        self
    }
}

/// Label hints: bare qubit and TLS frequencies, GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hints {
    pub nu_q: f64,
    pub nu_tls: f64,
}

/// Runs the full pipeline on one map. `drive` is the pulse amplitude A in GHz.
pub fn estimate(map: &SpectroscopyMap, hints: Hints, drive: f64, config: &EstimatorConfig) -> EstimateResult {
    assert!(drive > 0.0 && drive.is_finite(), "drive amplitude must be positive");
    let mut out = EstimateResult::empty();
    if !validity_filter(hints.nu_tls, hints.nu_q) {
        return out.reject(RejectReason::OutOfRange);
    }

    let profile = match contrast_profile(map) {
        Ok(p) => p,
        Err(_) => return out.reject(RejectReason::TooFewPoints),
    };
    let picks = match pick_peaks(&profile, &map.omega_axis, hints.nu_q, hints.nu_tls, config.window) {
        Ok(p) => p,
        Err(e) => return out.reject(e.into()),
    };
    let detuning = picks.tls.nu - picks.qubit.nu;
    out.nu_q_dressed_obs = Some(picks.qubit.nu);
    out.nu_tls_dressed_obs = Some(picks.tls.nu);
    out.detuning_dressed_obs = Some(detuning);

    let slice = map.column(picks.tls.index);
    let fit = match fit_damped_cosine(&map.time_axis, &slice) {
        Ok(f) => f,
        Err(e) => return out.reject(e.into()),
    };
    out.fit = Some(fit);

    let rabi = fit.angular_frequency() / TAU;
    let g = rabi * detuning.abs() / drive;
    out.g_hat = Some(g);
    out.nu_tls_hat = Some(config.shift_sign.apply(picks.tls.nu, g, detuning));

    let span = map.time_axis[map.time_axis.len() - 1] - map.time_axis[0];
    let reason = if !fit.converged {
        Some(RejectReason::NotConverged)
    } else if config.reject_window_edge && (picks.qubit.at_window_edge || picks.tls.at_window_edge) {
        Some(RejectReason::WindowEdge)
    } else if fit.amplitude() < config.min_amplitude {
        Some(RejectReason::LowAmplitude)
    } else if config.require_full_period && fit.angular_frequency() * span < TAU {
        Some(RejectReason::ShortWindow)
    } else if fit.amplitude() < config.min_snr * fit.residual_rms {
        Some(RejectReason::LowSnr)
    } else if g / detuning.abs() > config.max_coupling_ratio {
        Some(RejectReason::NonPerturbative)
    } else {
        None
    };
    match reason {
        Some(r) => out.reject(r),
        None => {
            out.valid = true;
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectroscopy::Grid;

    #[test]
    fn validity_boundaries() {
        assert!(validity_filter(7.19, 7.0));
        assert!(!validity_filter(7.21, 7.0));
        assert!(validity_filter(6.80, 7.0));
        assert!(!validity_filter(6.79, 7.0));
    }

    #[test]
    fn shift_signs() {
        assert!((ShiftSign::Repulsion.apply(7.1, 0.01, 0.1) - 7.099).abs() < 1e-12);
        assert!((ShiftSign::Additive.apply(7.1, 0.01, 0.1) - 7.101).abs() < 1e-12);
        // Below the qubit the repulsion correction moves the line up.
        assert!((ShiftSign::Repulsion.apply(6.9, 0.01, -0.1) - 6.901).abs() < 1e-12);
        assert_eq!("additive".parse::<ShiftSign>(), Ok(ShiftSign::Additive));
    }

    #[test]
    fn reason_names_roundtrip() {
        for r in RejectReason::ALL {
            assert_eq!(r.as_str().parse::<RejectReason>(), Ok(r));
        }
    }

    /// Map with a qubit peak at 7.0 and a TLS column at 7.1 oscillating at
    /// Ω = A·g/Δ̃ with g = 0.01, A = 0.02.
    fn synthetic_map() -> SpectroscopyMap {
        let omega = Grid::new(6.9, 7.2, 31).unwrap().points();
        let time = Grid::new(0.0, 1000.0, 201).unwrap().points();
        let rabi = 0.02 * 0.01 / 0.1;
        let mut values = vec![0.0; omega.len() * time.len()];
        for (i, &t) in time.iter().enumerate() {
            for (j, &w) in omega.iter().enumerate() {
                let v = if (w - 7.0).abs() < 1e-9 {
                    0.5 * (1.0 - (TAU * 0.05 * t).cos())
                } else if (w - 7.1).abs() < 1e-9 {
                    0.4 * (1.0 - (TAU * rabi * t).cos())
                } else {
                    0.01
                };
                values[i * omega.len() + j] = v;
            }
        }
        SpectroscopyMap::new(omega, time, values).unwrap()
    }

    #[test]
    fn synthetic_pipeline() {
        let map = synthetic_map();
        let hints = Hints { nu_q: 7.0, nu_tls: 7.1 };
        let r = estimate(&map, hints, 0.02, &EstimatorConfig::default());
        assert!(r.valid, "{:?}", r.reject_reason);
        assert!((r.g_hat.unwrap() - 0.01).abs() < 1e-6);
        assert!((r.nu_tls_hat.unwrap() - 7.099).abs() < 1e-6);
        assert_eq!(r, estimate(&map, hints, 0.02, &EstimatorConfig::default()));
    }

    #[test]
    fn out_of_range_hint_is_rejected() {
        let r = estimate(&synthetic_map(), Hints { nu_q: 7.0, nu_tls: 7.25 }, 0.02, &EstimatorConfig::default());
        assert!(!r.valid);
        assert_eq!(r.reject_reason, Some(RejectReason::OutOfRange));
    }

    #[test]
    fn colliding_hints_are_rejected() {
        let r = estimate(&synthetic_map(), Hints { nu_q: 7.0, nu_tls: 7.0 }, 0.02, &EstimatorConfig::default());
        assert_eq!(r.reject_reason, Some(RejectReason::PeaksCollide));
        assert!(r.fit.is_none());
    }
}
