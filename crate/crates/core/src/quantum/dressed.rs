use serde::{Deserialize, Serialize};

use crate::params::SystemParams;

/// Single-excitation eigenfrequencies of the coupled qubit + TLS, GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedFrequencies {
    pub nu_q_dressed: f64,
    pub nu_tls_dressed: f64,
    pub detuning_dressed: f64,
}

/// Diagonalizes `[[ν_q, g], [g, ν_tls]]`.
///
/// The eigenvalue whose eigenvector has the larger |10⟩ weight is the dressed
/// qubit. For a real symmetric 2×2 matrix that is the lower eigenvalue when
/// ν_q < ν_tls and the upper one when ν_q > ν_tls. On exact resonance the
/// weights tie and the lower eigenvalue is assigned to the qubit.
pub fn dressed_frequencies(params: &SystemParams) -> DressedFrequencies {
    let delta = params.nu_tls - params.nu_q;
    let mean = 0.5 * (params.nu_q + params.nu_tls);
    let half_split = (0.25 * delta * delta + params.g * params.g).sqrt();
    let (lower, upper) = (mean - half_split, mean + half_split);
    let (nu_q_dressed, nu_tls_dressed) = if delta >= 0.0 { (lower, upper) } else { (upper, lower) };
    DressedFrequencies { nu_q_dressed, nu_tls_dressed, detuning_dressed: nu_tls_dressed - nu_q_dressed }
}
