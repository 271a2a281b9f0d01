use num_complex::Complex64;

use super::Operator;

/// Dimension of the truncated space: three transmon levels times two TLS levels.
pub const DIM: usize = 6;

const QUBIT_LEVELS: usize = 3;
const TLS_LEVELS: usize = 2;

/// Basis index of `|n_q n_tls⟩`.
pub const fn basis_index(n_q: usize, n_tls: usize) -> usize {
    TLS_LEVELS * n_q + n_tls
}

/// Ladder operators of the qubit (`a`) and the TLS (`b`).
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub a: Operator,
    pub a_dag: Operator,
    pub b: Operator,
    pub b_dag: Operator,
}

impl Ladder {
    /// a†a
    pub fn n_q(&self) -> Operator {
        self.a_dag * self.a
    }

    /// b†b
    pub fn n_tls(&self) -> Operator {
        self.b_dag * self.b
    }
}

pub fn build_operators() -> Ladder {
    let mut a = Operator::zeros();
    let mut b = Operator::zeros();
    for n_q in 0..QUBIT_LEVELS {
        for n_tls in 0..TLS_LEVELS {
            let col = basis_index(n_q, n_tls);
            if n_q > 0 {
                a[(basis_index(n_q - 1, n_tls), col)] = Complex64::new((n_q as f64).sqrt(), 0.0);
            }
            if n_tls > 0 {
                b[(basis_index(n_q, n_tls - 1), col)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    Ladder { a_dag: a.adjoint(), b_dag: b.adjoint(), a, b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::MaxAbs;
    use nalgebra::Vector6;

    fn ket(n_q: usize, n_tls: usize) -> Vector6<Complex64> {
        let mut v = Vector6::zeros();
        v[basis_index(n_q, n_tls)] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn a_lowers_twenty_to_ten() {
        let ops = build_operators();
        let out = ops.a * ket(2, 0);
        let expected = ket(1, 0) * Complex64::new(2f64.sqrt(), 0.0);
        assert!((out - expected).max_abs() < 1e-15);
    }

    #[test]
    fn b_is_nilpotent() {
        let ops = build_operators();
        assert_eq!(ops.b * ops.b, Operator::zeros());
    }

    #[test]
    fn commutator_is_identity_below_truncation() {
        let ops = build_operators();
        let comm = ops.a * ops.a_dag - ops.a_dag * ops.a;
        // Computed entry by entry: on n_q ∈ {0, 1} the commutator is the identity.
        for n_q in 0..2 {
            for n_tls in 0..2 {
                for m_q in 0..2 {
                    for m_tls in 0..2 {
                        let i = basis_index(n_q, n_tls);
                        let j = basis_index(m_q, m_tls);
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((comm[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-15);
                    }
                }
            }
        }
        // The truncation shows up at the top level: [a, a†] = -2 on n_q = 2.
        assert!((comm[(4, 4)].re + 2.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_and_tls_operators_commute() {
        let ops = build_operators();
        assert!((ops.a * ops.b - ops.b * ops.a).max_abs() < 1e-15);
        assert!((ops.a * ops.b_dag - ops.b_dag * ops.a).max_abs() < 1e-15);
    }
}
