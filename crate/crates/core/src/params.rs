//! Physical parameters of one qubit + TLS instance.
//!
//! Frequencies are ordinary frequencies in GHz (the value of ω/2π), times are
//! in ns. Solvers convert to angular units (rad/ns) internally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2π, the factor between ordinary GHz and angular rad/ns.
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Default drive amplitude, GHz.
pub const DEFAULT_DRIVE_AMPLITUDE: f64 = 0.02;

/// Fixed bare qubit frequency, GHz.
pub const QUBIT_FREQUENCY: f64 = 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Bare qubit frequency, GHz.
    pub nu_q: f64,
    /// Bare TLS frequency, GHz.
    pub nu_tls: f64,
    /// Qubit anharmonicity, GHz.
    pub anharmonicity: f64,
    /// Qubit-TLS exchange coupling, GHz.
    pub g: f64,
    pub t1_q: f64,
    pub tphi_q: f64,
    pub t1_tls: f64,
    pub tphi_tls: f64,
    /// Drive amplitude, GHz. The resonant 0-1 Rabi frequency equals this value.
    pub drive: f64,
}

/// Dissipation and dephasing rates in 1/ns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rates {
    pub gamma_q: f64,
    pub kappa_q: f64,
    pub gamma_tls: f64,
    pub kappa_tls: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("nu_q", self.nu_q),
            ("nu_tls", self.nu_tls),
            ("anharmonicity", self.anharmonicity),
            ("g", self.g),
            ("t1_q", self.t1_q),
            ("tphi_q", self.tphi_q),
            ("t1_tls", self.t1_tls),
            ("tphi_tls", self.tphi_tls),
            ("drive", self.drive),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Rates γ = 1/T1 and κ = 1/Tφ. An infinite time gives a zero rate.
    pub fn rates(&self) -> Rates {
        Rates {
            gamma_q: self.t1_q.recip(),
            kappa_q: self.tphi_q.recip(),
            gamma_tls: self.t1_tls.recip(),
            kappa_tls: self.tphi_tls.recip(),
        }
    }

    /// Bare detuning ν_TLS − ν_q, GHz.
    pub fn detuning(&self) -> f64 {
        self.nu_tls - self.nu_q
    }

    /// Target vector q = [ν_TLS, g, T1_TLS, Tφ_TLS].
    pub fn targets(&self) -> [f64; 4] {
        [self.nu_tls, self.g, self.t1_tls, self.tphi_tls]
    }
}

/// Closed interval `[lo, hi]` for uniform sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sampling ranges for the randomized parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRanges {
    pub nu_q: f64,
    pub nu_tls: Range,
    pub anharmonicity: Range,
    pub g: Range,
    pub t1_q: Range,
    pub tphi_q: Range,
    pub t1_tls: Range,
    pub tphi_tls: Range,
}

impl Default for ParamRanges {
    fn default() -> Self {
        Self {
            nu_q: QUBIT_FREQUENCY,
            nu_tls: Range::new(6.75, 7.25),
            anharmonicity: Range::new(0.150, 0.300),
            g: Range::new(0.005, 0.050),
            t1_q: Range::new(1_000.0, 10_000.0),
            tphi_q: Range::new(500.0, 5_000.0),
            t1_tls: Range::new(500.0, 10_000.0),
            tphi_tls: Range::new(500.0, 20_000.0),
        }
    }
}

impl ParamRanges {
    /// Ranges of the four target components, in `targets()` order.
    pub fn target_ranges(&self) -> [Range; 4] {
        [self.nu_tls, self.g, self.t1_tls, self.tphi_tls]
    }
}
