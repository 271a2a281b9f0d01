use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use super::{build_operators, Operator, DIM};
use crate::params::Rates;

const SUPER_DIM: usize = DIM * DIM;

/// Linear map on row-major vectorized 6×6 matrices.
pub type Superoperator = SMatrix<Complex64, SUPER_DIM, SUPER_DIM>;
pub type SuperVector = SVector<Complex64, SUPER_DIM>;

/// Row-major vectorization: `vec(ρ)[6i + j] = ρ_ij`.
pub fn vec(m: &Operator) -> SuperVector {
    SuperVector::from_fn(|r, _| m[(r / DIM, r % DIM)])
}

pub fn unvec(v: &SuperVector) -> Operator {
    Operator::from_fn(|i, j| v[DIM * i + j])
}

/// One dissipator channel of the written form
/// `−(rate/2)(L†L ρ + ρ L†L − 2 L ρ L†)`.
fn dissipator(rho: &Operator, jump: &Operator, rate: f64) -> Operator {
    if rate == 0.0 {
        return Operator::zeros();
    }
    let jump_dag = jump.adjoint();
    let jj = jump_dag * jump;
    let two = Complex64::new(2.0, 0.0);
    (jj * rho + rho * jj - jump * rho * jump_dag * two) * Complex64::new(-0.5 * rate, 0.0)
}

/// dρ/dt of the master equation: coherent part −i[H, ρ] plus qubit and TLS
/// relaxation (jump operators a, b) and pure dephasing (jump operators a†a,
/// b†b), each with its own rate. `h` is in rad/ns, rates in 1/ns.
pub fn lindblad_rhs(rho: &Operator, h: &Operator, rates: &Rates) -> Operator {
    let ops = build_operators();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = (h * rho - rho * h) * minus_i;
    out += dissipator(rho, &ops.a, rates.gamma_q);
    out += dissipator(rho, &ops.n_q(), rates.kappa_q);
    out += dissipator(rho, &ops.b, rates.gamma_tls);
    out += dissipator(rho, &ops.n_tls(), rates.kappa_tls);
    out
}

/// Superoperator of `ρ ↦ left · ρ · right`.
fn sandwich(left: &Operator, right: &Operator) -> Superoperator {
    Superoperator::from_fn(|r, c| {
        let (i, j) = (r / DIM, r % DIM);
        let (k, l) = (c / DIM, c % DIM);
        left[(i, k)] * right[(l, j)]
    })
}

fn dissipator_super(jump: &Operator, rate: f64) -> Superoperator {
    if rate == 0.0 {
        return Superoperator::zeros();
    }
    let id = Operator::identity();
    let jump_dag = jump.adjoint();
    let jj = jump_dag * jump;
    (sandwich(&jj, &id) + sandwich(&id, &jj) - sandwich(jump, &jump_dag) * Complex64::new(2.0, 0.0))
        * Complex64::new(-0.5 * rate, 0.0)
}

/// Liouvillian of `lindblad_rhs` as a matrix acting on `vec(ρ)`.
pub fn liouvillian(h: &Operator, rates: &Rates) -> Superoperator {
    let ops = build_operators();
    let id = Operator::identity();
    let mut l = (sandwich(h, &id) - sandwich(&id, h)) * Complex64::new(0.0, -1.0);
    l += dissipator_super(&ops.a, rates.gamma_q);
    l += dissipator_super(&ops.n_q(), rates.kappa_q);
    l += dissipator_super(&ops.b, rates.gamma_tls);
    l += dissipator_super(&ops.n_tls(), rates.kappa_tls);
    l
}

/// Real coordinates of a Hermitian 6×6 matrix: `x[6i + i] = ρ_ii` and, for
/// i < j, `x[6i + j] = Re ρ_ij`, `x[6j + i] = Im ρ_ij`.
pub type Coords = SVector<f64, SUPER_DIM>;
/// The Liouvillian restricted to Hermitian matrices, acting on [`Coords`].
pub type RealSuperoperator = SMatrix<f64, SUPER_DIM, SUPER_DIM>;

/// Coordinates of the Hermitian part of `m`.
pub fn to_coords(m: &Operator) -> Coords {
    Coords::from_fn(|r, _| {
        let (i, j) = (r / DIM, r % DIM);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => m[(i, i)].re,
            std::cmp::Ordering::Less => 0.5 * (m[(i, j)].re + m[(j, i)].re),
            std::cmp::Ordering::Greater => 0.5 * (m[(j, i)].im - m[(i, j)].im),
        }
    })
}

pub fn from_coords(x: &Coords) -> Operator {
    Operator::from_fn(|i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Complex64::new(x[DIM * i + i], 0.0),
        std::cmp::Ordering::Less => Complex64::new(x[DIM * i + j], x[DIM * j + i]),
        std::cmp::Ordering::Greater => Complex64::new(x[DIM * j + i], -x[DIM * i + j]),
    })
}

/// Matrix of `lindblad_rhs` in Hermitian coordinates: column k is the
/// image of the k-th basis matrix under [`liouvillian`].
pub fn real_liouvillian(h: &Operator, rates: &Rates) -> RealSuperoperator {
    let full = liouvillian(h, rates);
    let mut l = RealSuperoperator::zeros();
    for k in 0..SUPER_DIM {
        let basis = vec(&from_coords(&Coords::from_fn(|r, _| if r == k { 1.0 } else { 0.0 })));
        let mut image = SuperVector::zeros();
        for (c, z) in basis.iter().enumerate().filter(|(_, z)| **z != Complex64::new(0.0, 0.0)) {
            image += full.column(c) * *z;
        }
        l.set_column(k, &to_coords(&unvec(&image)));
    }
    l
}

/// Covector `n` with `n · to_coords(ρ) = Re Tr(ρ O)`.
pub fn observable_coords(op: &Operator) -> Coords {
    Coords::from_fn(|k, _| {
        let basis = from_coords(&Coords::from_fn(|r, _| if r == k { 1.0 } else { 0.0 }));
        super::trace_product(&basis, op).re
    })
}
