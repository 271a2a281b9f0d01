//! Levenberg–Marquardt fit of p(t) = c1 + c2·exp(−c3·t)·cos(c4·t + c5).

use std::f64::consts::{PI, TAU};

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_ITERATIONS: usize = 200;
const COST_RTOL: f64 = 1e-10;
const GRADIENT_TOL: f64 = 1e-12;
const MIN_POINTS: usize = 10;

type Vec5 = SVector<f64, 5>;
type Mat5 = SMatrix<f64, 5, 5>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum FitError {
    #[error("need at least {MIN_POINTS} points")]
    TooFewPoints,
    #[error("times must be finite and strictly increasing")]
    BadTimes,
    #[error("normal equations are singular")]
    SingularJacobian,
}

/// Fitted parameters: offset, amplitude, decay rate (1/ns), angular
/// frequency (rad/ns) and phase (rad). Normalized so that c2, c3, c4 ≥ 0 and
/// c5 ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub c: [f64; 5],
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn offset(&self) -> f64 {
        self.c[0]
    }
    pub fn amplitude(&self) -> f64 {
        self.c[1]
    }
    pub fn decay(&self) -> f64 {
        self.c[2]
    }
    /// Ω, rad/ns.
    pub fn angular_frequency(&self) -> f64 {
        self.c[3]
    }
    pub fn phase(&self) -> f64 {
        self.c[4]
    }
}

pub fn damped_cosine(c: &[f64; 5], t: f64) -> f64 {
    c[0] + c[1] * (-c[2] * t).exp() * (c[3] * t + c[4]).cos()
}

/// Angular frequency of the strongest nonzero Fourier component of the
/// mean-removed signal, evaluated at ω_k = 2πk / span for k = 1..n/2.
fn dominant_frequency(times: &[f64], values: &[f64]) -> f64 {
    let span = times[times.len() - 1] - times[0];
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut best = (0.0, TAU / span);
    for k in 1..=times.len() / 2 {
        let w = TAU * k as f64 / span;
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in times.iter().zip(values) {
            let phase = w * (t - times[0]);
            re += (v - mean) * phase.cos();
            im -= (v - mean) * phase.sin();
        }
        let power = re * re + im * im;
        if power > best.0 {
            best = (power, w);
        }
    }
    best.1
}

fn normalize(mut c: [f64; 5]) -> [f64; 5] {
    if c[3] < 0.0 {
        c[3] = -c[3];
        c[4] = -c[4];
    }
    if c[1] < 0.0 {
        c[1] = -c[1];
        c[4] += PI;
    }
    c[2] = c[2].max(0.0);
    c[4] = c[4].rem_euclid(TAU);
    if c[4] >= TAU {
        c[4] = 0.0;
    }
    c
}

/// Residuals and Jacobian in scaled time τ = t / t_max, where the decay
/// rate and frequency become c3·t_max and c4·t_max.
fn residuals(x: &Vec5, tau: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let r: Vec<f64> = tau.iter().zip(y).map(|(&t, &v)| damped_cosine(&[x[0], x[1], x[2], x[3], x[4]], t) - v).collect();
    let cost = r.iter().map(|v| v * v).sum::<f64>();
    (r, cost)
}

fn normal_equations(x: &Vec5, tau: &[f64], r: &[f64]) -> (Mat5, Vec5) {
    let mut jtj = Mat5::zeros();
    let mut jtr = Vec5::zeros();
    for (&t, &ri) in tau.iter().zip(r) {
        let env = (-x[2] * t).exp();
        let arg = x[3] * t + x[4];
        let (s, c) = arg.sin_cos();
        let row = Vec5::new(1.0, env * c, -t * x[1] * env * c, -t * x[1] * env * s, -x[1] * env * s);
        jtj += row * row.transpose();
        jtr += row * ri;
    }
    (jtj, jtr)
}

/// Least-squares fit with the initialization c1 = mean, c2 = (max − min)/2,
/// c3 = 1/t_max, c4 from the dominant Fourier bin, c5 = 0. Converged means
/// the relative cost decrease of an accepted step fell below 1e−10 or the
/// gradient norm below 1e−12 within 200 iterations.
pub fn fit_damped_cosine(times: &[f64], values: &[f64]) -> Result<FitResult, FitError> {
    assert_eq!(times.len(), values.len(), "times and values differ in length");
    if times.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints);
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FitError::BadTimes);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FitError::SingularJacobian);
    }

    let t_max = times[times.len() - 1];
    let scale = if t_max > 0.0 { t_max } else { 1.0 };
    let tau: Vec<f64> = times.iter().map(|t| t / scale).collect();

    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut x = Vec5::new(mean, 0.5 * (hi - lo), 1.0, dominant_frequency(times, values) * scale, 0.0);

    let (mut r, mut cost) = residuals(&x, &tau, values);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (mut jtj, mut jtr) = normal_equations(&x, &tau, &r);
        // c3 = 0 with the gradient pointing to negative decay: hold it fixed.
        if x[2] <= 0.0 && jtr[2] > 0.0 {
            jtj.row_mut(2).fill(0.0);
            jtj.column_mut(2).fill(0.0);
            jtj[(2, 2)] = 1.0;
            jtr[2] = 0.0;
        }
        if jtr.amax() < GRADIENT_TOL || cost == 0.0 {
            converged = true;
            break;
        }
        let diag_floor = 1e-12 * jtj.diagonal().amax().max(f64::MIN_POSITIVE);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for i in 0..5 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(diag_floor);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-jtr));
            let mut candidate = x + step;
            candidate[2] = candidate[2].max(0.0);
            let (r_new, cost_new) = residuals(&candidate, &tau, values);
            if cost_new.is_finite() && cost_new <= cost {
                let decrease = (cost - cost_new) / cost.max(f64::MIN_POSITIVE);
                x = candidate;
                r = r_new;
                cost = cost_new;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if decrease < COST_RTOL {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            // No descent direction at any damping: numerically stationary.
            if !jtj.diagonal().iter().all(|d| d.is_finite()) {
                return Err(FitError::SingularJacobian);
            }
            converged = true;
        }
        if converged {
            break;
        }
    }

    let c = normalize([x[0], x[1], x[2] / scale, x[3] / scale, x[4]]);
    Ok(FitResult { c, residual_rms: (cost / n).sqrt(), converged, iterations })
}
