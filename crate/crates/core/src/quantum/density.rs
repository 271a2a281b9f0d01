use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{MaxAbs, basis_index, trace_product, Operator, DIM};
use crate::error::{Error, Result};

/// Maximum allowed ‖ρ − ρ†‖_max.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Maximum allowed |Tr ρ − 1|.
pub const TRACE_TOL: f64 = 1e-8;
/// Minimum allowed eigenvalue is −POSITIVITY_TOL.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// A validated state of the truncated qubit ⊗ TLS system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

/// Measured deviations from the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.trace_error <= TRACE_TOL
            && self.hermiticity_error <= HERMITICITY_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }
}

impl DensityMatrix {
    /// |00⟩⟨00|
    pub fn ground() -> Self {
        Self::basis(0, 0)
    }

    /// |n_q n_tls⟩⟨n_q n_tls|
    pub fn basis(n_q: usize, n_tls: usize) -> Self {
        let mut m = Operator::zeros();
        let i = basis_index(n_q, n_tls);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    /// Validates trace, hermiticity and positivity. `t` only labels the error.
    pub fn try_new(m: Operator, t: f64) -> Result<Self> {
        let trace_error = (m.trace() - Complex64::new(1.0, 0.0)).norm();
        if trace_error > TRACE_TOL {
            return Err(Error::InvariantViolation { t, what: format!("|Tr ρ − 1| = {trace_error:e}") });
        }
        let herm = hermiticity_error(&m);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvariantViolation { t, what: format!("‖ρ − ρ†‖ = {herm:e}") });
        }
        // A successful factorization of ρ + ε·I proves λ_min > −ε; otherwise
        // the eigenvalues decide.
        if !cholesky_succeeds(&(hermitian_part(&m) + Operator::identity() * Complex64::new(POSITIVITY_TOL, 0.0))) {
            let min_eig = min_eigenvalue(&m);
            if min_eig < -POSITIVITY_TOL {
                return Err(Error::InvariantViolation { t, what: format!("min eigenvalue {min_eig:e}") });
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_inner(self) -> Operator {
        self.0
    }

    /// ⟨O⟩ = Re Tr(ρ O) for Hermitian O.
    pub fn expectation(&self, op: &Operator) -> f64 {
        trace_product(&self.0, op).re
    }

    /// Population of a basis state.
    pub fn population(&self, n_q: usize, n_tls: usize) -> f64 {
        let i = basis_index(n_q, n_tls);
        self.0[(i, i)].re
    }

    pub fn report(&self) -> InvariantReport {
        InvariantReport {
            trace_error: (self.0.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_error: hermiticity_error(&self.0),
            min_eigenvalue: min_eigenvalue(&self.0),
        }
    }
}

fn hermiticity_error(m: &Operator) -> f64 {
    (m - m.adjoint()).max_abs()
}

fn hermitian_part(m: &Operator) -> Operator {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Hermitian Cholesky with strictly positive real pivots.
fn cholesky_succeeds(m: &Operator) -> bool {
    let mut l = Operator::zeros();
    for j in 0..DIM {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let pivot = d.sqrt();
        l[(j, j)] = Complex64::new(pivot, 0.0);
        for i in j + 1..DIM {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / pivot;
        }
    }
    true
}

fn min_eigenvalue(m: &Operator) -> f64 {
    let eig = SymmetricEigen::new(hermitian_part(m));
    (0..DIM).map(|i| eig.eigenvalues[i]).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_states_are_valid() {
        for n_q in 0..3 {
            for n_tls in 0..2 {
                let rho = DensityMatrix::basis(n_q, n_tls);
                assert!(rho.report().holds());
                assert!(DensityMatrix::try_new(*rho.matrix(), 0.0).is_ok());
            }
        }
    }

    #[test]
    fn cholesky_agrees_with_eigenvalues() {
        let g = Operator::from_fn(|i, j| Complex64::new((i as f64 - j as f64).sin(), (i * j) as f64 * 0.1));
        let m = g * g.adjoint();
        for shift in [-2.0, -0.5, 0.0, 0.3, 1.0] {
            let s = m + Operator::identity() * Complex64::new(shift - min_eigenvalue(&m) + 1e-6, 0.0);
            assert_eq!(cholesky_succeeds(&s), min_eigenvalue(&s) > 0.0, "shift {shift}");
            let s = m + Operator::identity() * Complex64::new(-min_eigenvalue(&m) - 1e-3, 0.0);
            assert!(!cholesky_succeeds(&s));
        }
    }

    #[test]
    fn rejects_bad_trace() {
        let m = Operator::identity() * Complex64::new(0.5, 0.0);
        assert!(matches!(DensityMatrix::try_new(m, 1.0), Err(Error::InvariantViolation { .. })));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let mut m = Operator::zeros();
        m[(0, 0)] = Complex64::new(1.1, 0.0);
        m[(1, 1)] = Complex64::new(-0.1, 0.0);
        let err = DensityMatrix::try_new(m, 2.0).unwrap_err();
        assert!(err.to_string().contains("eigenvalue"));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = *DensityMatrix::ground().matrix();
        m[(0, 1)] = Complex64::new(1e-6, 0.0);
        assert!(DensityMatrix::try_new(m, 0.0).is_err());
    }
}
