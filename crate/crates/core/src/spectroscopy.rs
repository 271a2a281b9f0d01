//! Two-tone spectroscopy protocol.
//!
//! For each drive frequency ν_d the system starts in |00⟩, is driven at ν_d
//! for a time t_A (pulse A), then receives a π-pulse at the dressed qubit
//! frequency (pulse B), after which the transmon population ⟨a†a⟩ is read
//! out. Sweeping ν_d and t_A gives the population map.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::quantum::{
    build_hamiltonian, build_operators, dressed_frequencies, evolve, observable_coords, to_coords, Coords,
    DensityMatrix, Method, Operator, Propagator,
};

/// Uniform grid `lo:hi:n`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let grid = Self { lo, hi, n };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !(self.hi > self.lo) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidParams(format!("grid {self} must be strictly increasing with n >= 2")));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidParams(format!("grid `{s}` is not of the form lo:hi:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        Grid::new(lo, hi, n)
    }
}

/// π-pulse length in ns for a drive amplitude in GHz: the resonant Rabi
/// frequency is 2π·A rad/ns, so t_π = π / (2π·A) = 1 / (2A).
pub fn pi_pulse_duration(drive: f64) -> f64 {
    0.5 / drive
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Drive frequencies ν_d, GHz.
    pub omega: Grid,
    /// Pulse-A durations t_A, ns.
    pub time: Grid,
    /// Drive amplitude, GHz. Used for both pulses.
    pub drive: f64,
    #[serde(default)]
    pub method: Method,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            omega: Grid { lo: 6.6, hi: 7.4, n: 801 },
            time: Grid { lo: 0.0, hi: 1000.0, n: 201 },
            drive: crate::params::DEFAULT_DRIVE_AMPLITUDE,
            method: Method::Propagator,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        self.omega.validate()?;
        self.time.validate()?;
        if self.time.lo < 0.0 {
            return Err(Error::InvalidParams("pulse-A durations must be non-negative".into()));
        }
        if !(self.drive > 0.0) || !self.drive.is_finite() {
            return Err(Error::InvalidParams(format!("drive amplitude must be positive, got {}", self.drive)));
        }
        Ok(())
    }

    pub fn t_pi(&self) -> f64 {
        pi_pulse_duration(self.drive)
    }
}

/// Population map P(ν_d, t_A): rows are pulse-A durations, columns drive
/// frequencies, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectroscopyMap {
    pub omega_axis: Vec<f64>,
    pub time_axis: Vec<f64>,
    values: Vec<f64>,
}

impl SpectroscopyMap {
    pub fn new(omega_axis: Vec<f64>, time_axis: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != omega_axis.len() * time_axis.len() {
            return Err(Error::InvalidParams(format!(
                "map has {} values for {} × {} axes",
                values.len(),
                time_axis.len(),
                omega_axis.len()
            )));
        }
        Ok(Self { omega_axis, time_axis, values })
    }

    pub fn rows(&self) -> usize {
        self.time_axis.len()
    }

    pub fn cols(&self) -> usize {
        self.omega_axis.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.cols();
        &self.values[row * c..(row + 1) * c]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows()).map(|r| self.get(r, col)).collect()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Maps a post-pulse-A state to the measured population.
enum Readout {
    /// Covector of `ρ ↦ Tr(Φ_B(ρ) a†a)` in Hermitian coordinates.
    Linear(Coords),
    Evolve { h: Operator, t_pi: f64 },
}

/// Runs the protocol over the configured grids. The amplitude in `config`
/// takes precedence over `params.drive`.
pub fn run_protocol(params: &SystemParams, config: &ProtocolConfig) -> Result<SpectroscopyMap> {
    config.validate()?;
    let params = SystemParams { drive: config.drive, ..*params };
    params.validate()?;
    let rates = params.rates();
    let dressed = dressed_frequencies(&params);
    let number = build_operators().n_q();
    let t_pi = config.t_pi();
    let h_b = build_hamiltonian(&params, dressed.nu_q_dressed);

    let readout = match config.method {
        Method::Propagator => {
            let mut pulse_b = Propagator::new(&h_b, &rates);
            Readout::Linear(pulse_b.step(t_pi).tr_mul(&observable_coords(&number)))
        }
        _ => Readout::Evolve { h: h_b, t_pi },
    };

    let omegas = config.omega.points();
    let times = config.time.points();
    let columns: Vec<Vec<f64>> = omegas
        .par_iter()
        .map(|&nu_d| {
            run_column(&params, nu_d, &times, config.method, &readout, &number)
                .map_err(|e| Error::Protocol { nu_d, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;

    let (rows, cols) = (times.len(), omegas.len());
    let mut values = vec![0.0; rows * cols];
    for (c, column) in columns.iter().enumerate() {
        for (r, v) in column.iter().enumerate() {
            values[r * cols + c] = *v;
        }
    }
    SpectroscopyMap::new(omegas, times, values)
}

fn run_column(
    params: &SystemParams,
    nu_d: f64,
    times: &[f64],
    method: Method,
    readout: &Readout,
    number: &Operator,
) -> Result<Vec<f64>> {
    let rates = params.rates();
    let h_a = build_hamiltonian(params, nu_d);
    let states = evolve(&DensityMatrix::ground(), &h_a, &rates, times, method)?;
    states
        .iter()
        .zip(times)
        .map(|(rho, &t_a)| match readout {
            Readout::Linear(row) => Ok(row.dot(&to_coords(rho.matrix()))),
            Readout::Evolve { h, t_pi } => {
                let after = evolve(rho, h, &rates, &[*t_pi], method).map_err(|e| match e {
                    Error::InvariantViolation { what, .. } => Error::InvariantViolation { t: t_a + t_pi, what },
                    other => other,
                })?;
                Ok(after[0].expectation(number))
            }
        })
        .collect()
}

/// Adds independent δP ~ U[−width/2, width/2] to every pixel. Values are not
/// clamped. Deterministic in `seed`.
pub fn add_noise(map: &SpectroscopyMap, width: f64, seed: u64) -> Result<SpectroscopyMap> {
    if !(0.0..=0.5).contains(&width) {
        return Err(Error::InvalidParams(format!("noise width must lie in [0, 0.5], got {width}")));
    }
    if width == 0.0 {
        return Ok(map.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-0.5 * width, 0.5 * width).expect("finite bounds");
    let values = map.values.iter().map(|v| v + dist.sample(&mut rng)).collect();
    SpectroscopyMap::new(map.omega_axis.clone(), map.time_axis.clone(), values)
}
