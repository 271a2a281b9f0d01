use num_complex::Complex64;

use super::{build_operators, Operator};
use crate::params::{SystemParams, TWO_PI};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Hamiltonian in the frame rotating at the drive frequency `nu_d` (GHz),
/// under the rotating-wave approximation. Returned in rad/ns.
///
/// H = (ω_q−ω_d)a†a − (U/2)a†a†aa + (ω_TLS−ω_d)b†b + g(a†b + b†a) + (A/2)(a + a†)
pub fn build_hamiltonian(params: &SystemParams, nu_d: f64) -> Operator {
    let ops = build_operators();
    let n_q = ops.n_q();
    let n_tls = ops.n_tls();
    let pair = ops.a_dag * ops.a_dag * ops.a * ops.a;
    let exchange = ops.a_dag * ops.b + ops.b_dag * ops.a;
    let drive = ops.a + ops.a_dag;

    let h = n_q * real(params.nu_q - nu_d) - pair * real(params.anharmonicity / 2.0)
        + n_tls * real(params.nu_tls - nu_d)
        + exchange * real(params.g)
        + drive * real(params.drive / 2.0);
    h * real(TWO_PI)
}

/// Lab-frame Hamiltonian with an explicit cosine drive A·cos(ω_d t)(a + a†),
/// in rad/ns. Used to check the rotating-frame reduction.
pub fn lab_frame_hamiltonian(params: &SystemParams, nu_d: f64, t: f64) -> Operator {
    let ops = build_operators();
    let pair = ops.a_dag * ops.a_dag * ops.a * ops.a;
    let exchange = ops.a_dag * ops.b + ops.b_dag * ops.a;
    let drive = ops.a + ops.a_dag;
    let envelope = params.drive * (TWO_PI * nu_d * t).cos();

    let h = ops.n_q() * real(params.nu_q) - pair * real(params.anharmonicity / 2.0)
        + ops.n_tls() * real(params.nu_tls)
        + exchange * real(params.g)
        + drive * real(envelope);
    h * real(TWO_PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::MaxAbs;
    use crate::quantum::basis_index;

    fn params() -> SystemParams {
        SystemParams {
            nu_q: 7.0,
            nu_tls: 7.1,
            anharmonicity: 0.2,
            g: 0.02,
            t1_q: 5000.0,
            tphi_q: 2000.0,
            t1_tls: 3000.0,
            tphi_tls: 8000.0,
            drive: 0.02,
        }
    }

    #[test]
    fn resonant_uncoupled_frame_is_diagonal() {
        let p = SystemParams { g: 0.0, drive: 0.0, ..params() };
        let h = build_hamiltonian(&p, p.nu_q);
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(h[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        let ten = basis_index(1, 0);
        let twenty = basis_index(2, 0);
        assert!(h[(ten, ten)].norm() < 1e-15);
        assert!((h[(twenty, twenty)].re + TWO_PI * p.anharmonicity).abs() < 1e-12);
    }

    #[test]
    fn exchange_block_on_resonance() {
        let p = SystemParams { nu_tls: 7.0, drive: 0.0, ..params() };
        let h = build_hamiltonian(&p, 7.0);
        let ten = basis_index(1, 0);
        let one = basis_index(0, 1);
        assert!(h[(ten, ten)].norm() < 1e-15);
        assert!(h[(one, one)].norm() < 1e-15);
        assert!((h[(ten, one)].re - TWO_PI * p.g).abs() < 1e-15);
        assert!((h[(one, ten)].re - TWO_PI * p.g).abs() < 1e-15);
    }

    #[test]
    fn hermitian_by_construction() {
        let p = params();
        for nu_d in [6.6, 7.0, 7.3] {
            let h = build_hamiltonian(&p, nu_d);
            assert_eq!((h - h.adjoint()).max_abs(), 0.0);
        }
        let h = lab_frame_hamiltonian(&p, 7.0, 3.3);
        assert_eq!((h - h.adjoint()).max_abs(), 0.0);
    }
}
