//! Truncated qubit ⊗ TLS Hilbert space: operators, Hamiltonian, Lindblad
//! generator, time evolution and dressed frequencies.
//!
//! Basis ordering is fixed: index `2·n_q + n_tls` for `|n_q n_tls⟩` with
//! `n_q ∈ {0, 1, 2}` and `n_tls ∈ {0, 1}`.

mod density;
mod dressed;
mod evolve;
mod hamiltonian;
mod lindblad;
mod operators;

pub use density::{DensityMatrix, InvariantReport, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};
pub use dressed::{dressed_frequencies, DressedFrequencies};
pub use evolve::{evolve, integrate_adaptive, integrate_fixed_rk4, Method, Propagator};
pub use hamiltonian::{build_hamiltonian, lab_frame_hamiltonian};
pub use lindblad::{
    from_coords, lindblad_rhs, liouvillian, observable_coords, real_liouvillian, to_coords, unvec, vec, Coords,
    RealSuperoperator, SuperVector, Superoperator,
};
pub use operators::{basis_index, build_operators, Ladder, DIM};

use nalgebra::Matrix6;
use num_complex::Complex64;

/// A 6×6 complex matrix on the truncated product space.
pub type Operator = Matrix6<Complex64>;

/// Largest entry modulus.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<Complex64, R, C>> MaxAbs
    for nalgebra::Matrix<Complex64, R, C, S>
{
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Tr(A·B) without forming the product.
pub fn trace_product(a: &Operator, b: &Operator) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..DIM {
        for k in 0..DIM {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
