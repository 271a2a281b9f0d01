//! Time evolution of the master equation.
//!
//! Three interchangeable methods: an adaptive Dormand–Prince 5(4) integrator,
//! classic fixed-step RK4, and exact propagation with the matrix exponential
//! of the (time-independent) Liouvillian. All return the state at every
//! requested snapshot and validate it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    from_coords, lindblad_rhs, real_liouvillian, to_coords, Coords, DensityMatrix, MaxAbs, Operator, RealSuperoperator,
};
use crate::error::{Error, Result};
use crate::params::Rates;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Adaptive { rtol: f64, atol: f64 },
    FixedRk4 { dt: f64 },
    #[default]
    Propagator,
}

impl Method {
    /// Tolerances used by tests and reference runs.
    pub const REFERENCE: Method = Method::Adaptive { rtol: 1e-8, atol: 1e-10 };
    /// Tolerances for bulk generation with the Runge–Kutta path.
    pub const BULK_RK: Method = Method::Adaptive { rtol: 1e-6, atol: 1e-8 };
}


fn check_snapshots(snapshots: &[f64]) -> Result<()> {
    if snapshots.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParams("snapshot times must be finite and non-negative".into()));
    }
    if snapshots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("snapshot times must be sorted ascending".into()));
    }
    Ok(())
}

/// Evolves `rho0` from t = 0 under `h` (rad/ns) and the dissipation `rates`,
/// returning the state at each snapshot time (ns).
pub fn evolve(
    rho0: &DensityMatrix,
    h: &Operator,
    rates: &Rates,
    snapshots: &[f64],
    method: Method,
) -> Result<Vec<DensityMatrix>> {
    check_snapshots(snapshots)?;
    let raw = match method {
        Method::Adaptive { rtol, atol } => {
            integrate_adaptive(|_, rho| lindblad_rhs(rho, h, rates), rho0.matrix(), snapshots, rtol, atol)?
        }
        Method::FixedRk4 { dt } => {
            if !(dt > 0.0) {
                return Err(Error::InvalidParams(format!("fixed step must be positive, got {dt}")));
            }
            integrate_fixed_rk4(|_, rho| lindblad_rhs(rho, h, rates), rho0.matrix(), snapshots, dt)
        }
        Method::Propagator => {
            let mut prop = Propagator::new(h, rates);
            let mut state = to_coords(rho0.matrix());
            let mut t = 0.0;
            let mut out = Vec::with_capacity(snapshots.len());
            for &target in snapshots {
                if target > t {
                    state = prop.apply(&state, target - t);
                    t = target;
                }
                out.push(from_coords(&state));
            }
            out
        }
    };
    raw.into_iter().zip(snapshots).map(|(m, &t)| DensityMatrix::try_new(m, t)).collect()
}

/// exp(L·dt) for a fixed Liouvillian in Hermitian coordinates, caching the
/// most recent step.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: RealSuperoperator,
    cached: Option<(f64, Box<RealSuperoperator>)>,
}

impl Propagator {
    pub fn new(h: &Operator, rates: &Rates) -> Self {
        Self { generator: real_liouvillian(h, rates), cached: None }
    }

    pub fn step(&mut self, dt: f64) -> &RealSuperoperator {
        let hit = matches!(&self.cached, Some((cached_dt, _)) if (cached_dt - dt).abs() <= 1e-12 * dt.abs());
        if !hit {
            self.cached = Some((dt, Box::new((self.generator * dt).exp())));
        }
        &self.cached.as_ref().expect("filled above").1
    }

    pub fn apply(&mut self, state: &Coords, dt: f64) -> Coords {
        self.step(dt) * state
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn scaled(m: &Operator, s: f64) -> Operator {
    m * Complex64::new(s, 0.0)
}

fn combine(y: &Operator, h: f64, ks: &[&Operator], weights: &[f64]) -> Operator {
    let mut out = *y;
    for (k, w) in ks.iter().zip(weights) {
        if *w != 0.0 {
            out += scaled(k, h * w);
        }
    }
    out
}

fn error_norm(err: &Operator, y: &Operator, y_new: &Operator, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..err.len() {
        let scale = atol + rtol * y[i].norm().max(y_new[i].norm());
        let e = err[i].norm() / scale;
        acc += e * e;
    }
    (acc / err.len() as f64).sqrt()
}

/// Adaptive Dormand–Prince integration of `dy/dt = rhs(t, y)` from t = 0,
/// landing exactly on each (sorted, non-negative) target time.
pub fn integrate_adaptive<F>(mut rhs: F, y0: &Operator, targets: &[f64], rtol: f64, atol: f64) -> Result<Vec<Operator>>
where
    F: FnMut(f64, &Operator) -> Operator,
{
    const SAFETY: f64 = 0.9;
    const MIN_FACTOR: f64 = 0.2;
    const MAX_FACTOR: f64 = 5.0;

    let mut t = 0.0;
    let mut y = *y0;
    let mut k1 = rhs(t, &y);
    let horizon = targets.last().copied().unwrap_or(0.0);
    let mut h = {
        let f_norm = k1.max_abs();
        let guess = if f_norm > 0.0 { 0.01 * y.max_abs().max(atol) / f_norm } else { horizon };
        guess.clamp(1e-6, horizon.max(1e-6))
    };

    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        while t < target {
            let remaining = target - t;
            let lands = h >= remaining;
            let step = if lands { remaining } else { h };
            if step < 1e-12 * t.max(1.0) {
                return Err(Error::StepSizeUnderflow { t, step });
            }

            let k2 = rhs(t + C[1] * step, &combine(&y, step, &[&k1], &[A21]));
            let k3 = rhs(t + C[2] * step, &combine(&y, step, &[&k1, &k2], &A3));
            let k4 = rhs(t + C[3] * step, &combine(&y, step, &[&k1, &k2, &k3], &A4));
            let k5 = rhs(t + C[4] * step, &combine(&y, step, &[&k1, &k2, &k3, &k4], &A5));
            let k6 = rhs(t + C[5] * step, &combine(&y, step, &[&k1, &k2, &k3, &k4, &k5], &A6));
            let y_new = combine(&y, step, &[&k1, &k2, &k3, &k4, &k5, &k6], &B);
            let k7 = rhs(t + step, &y_new);

            let err_est = combine(&Operator::zeros(), step, &[&k1, &k2, &k3, &k4, &k5, &k6, &k7], &E);
            let err = error_norm(&err_est, &y, &y_new, rtol, atol);
            if !err.is_finite() {
                return Err(Error::StepSizeUnderflow { t, step });
            }

            if err <= 1.0 {
                t = if lands { target } else { t + step };
                y = y_new;
                k1 = k7;
                let factor = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
                // A step shortened to land on a snapshot says nothing about the
                // natural step size, so only grow from the proposed value.
                h = if lands { h.max(step * factor) } else { step * factor };
            } else {
                h = step * (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Classic RK4 with step `dt`. Each gap between targets is split into the
/// smallest number of equal steps no longer than `dt`.
pub fn integrate_fixed_rk4<F>(mut rhs: F, y0: &Operator, targets: &[f64], dt: f64) -> Vec<Operator>
where
    F: FnMut(f64, &Operator) -> Operator,
{
    let mut t = 0.0;
    let mut y = *y0;
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        let gap = target - t;
        if gap > 0.0 {
            let n = (gap / dt - 1e-9).ceil().max(1.0) as usize;
            let step = gap / n as f64;
            for i in 0..n {
                let ti = t + i as f64 * step;
                let k1 = rhs(ti, &y);
                let k2 = rhs(ti + 0.5 * step, &(y + scaled(&k1, 0.5 * step)));
                let k3 = rhs(ti + 0.5 * step, &(y + scaled(&k2, 0.5 * step)));
                let k4 = rhs(ti + step, &(y + scaled(&k3, step)));
                y += scaled(&(k1 + scaled(&k2, 2.0) + scaled(&k3, 2.0) + k4), step / 6.0);
            }
            t = target;
        }
        out.push(y);
    }
    out
}
