use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum PeakError {
    #[error("no grid point within the search window")]
    EmptyWindow,
    #[error("qubit and TLS windows select the same grid point")]
    PeaksCollide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    /// Drive frequency of the peak, GHz.
    pub nu: f64,
    pub contrast: f64,
    /// The maximum sits on the first or last grid point of its window.
    pub at_window_edge: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakPicks {
    pub qubit: Peak,
    pub tls: Peak,
}

fn argmax_near(profile: &[f64], omega: &[f64], hint: f64, window: f64) -> Result<Peak, PeakError> {
    let inside: Vec<usize> = (0..omega.len()).filter(|&i| (omega[i] - hint).abs() <= window).collect();
    let (&first, &last) = match (inside.first(), inside.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(PeakError::EmptyWindow),
    };
    // First maximum wins on ties.
    let index = inside.iter().copied().fold(first, |best, i| if profile[i] > profile[best] { i } else { best });
    Ok(Peak {
        index,
        nu: omega[index],
        contrast: profile[index],
        at_window_edge: inside.len() > 1 && (index == first || index == last),
    })
}

/// Highest contrast within ±`window` GHz of each hint.
pub fn pick_peaks(
    profile: &[f64],
    omega_axis: &[f64],
    nu_q_hint: f64,
    nu_tls_hint: f64,
    window: f64,
) -> Result<PeakPicks, PeakError> {
    assert_eq!(profile.len(), omega_axis.len(), "profile and axis lengths differ");
    let qubit = argmax_near(profile, omega_axis, nu_q_hint, window)?;
    let tls = argmax_near(profile, omega_axis, nu_tls_hint, window)?;
    if qubit.index == tls.index {
        return Err(PeakError::PeaksCollide);
    }
    Ok(PeakPicks { qubit, tls })
}
