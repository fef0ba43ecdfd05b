//! Standard normalized states on the grid: Gaussian packets, oscillator
//! coherent states, oscillator eigenstates.

use crate::{QuantumError, StateVector};
use gridcore::{Grid1D, C64};
use ndarray::Array1;

/// Gaussian packet centered at `(q0, p0)` with position variance `sigma^2`:
/// `psi(q) = (2 pi sigma^2)^{-1/4} exp(-(q-q0)^2/(4 sigma^2) + i p0 q)`,
/// renormalized on the grid.
pub fn gaussian_state(
    grid: &Grid1D,
    q0: f64,
    p0: f64,
    sigma: f64,
) -> Result<StateVector, QuantumError> {
    assert!(sigma > 0.0, "width must be positive");
    let amps: Array1<C64> = grid
        .q_points()
        .iter()
        .map(|&q| {
            let envelope = (-(q - q0) * (q - q0) / (4.0 * sigma * sigma)).exp();
            envelope * C64::from_polar(1.0, p0 * q)
        })
        .collect();
    StateVector::normalized(grid.clone(), amps)
}

/// Oscillator coherent state for frequency `omega` and the grid's mass:
/// displacement `q0 = sqrt(2/(m omega)) Re(alpha)`, `p0 = sqrt(2 m omega) Im(alpha)`,
/// ground-state width `sigma^2 = 1/(2 m omega)`, with the symmetric phase
/// convention `exp(i p0 q - i p0 q0 / 2)`.
pub fn coherent_state(grid: &Grid1D, omega: f64, alpha: C64) -> Result<StateVector, QuantumError> {
    let m_omega = grid.mass() * omega;
    let q0 = (2.0 / m_omega).sqrt() * alpha.re;
    let p0 = (2.0 * m_omega).sqrt() * alpha.im;
    let amps: Array1<C64> = grid
        .q_points()
        .iter()
        .map(|&q| {
            let envelope = (-m_omega * (q - q0) * (q - q0) / 2.0).exp();
            envelope * C64::from_polar(1.0, p0 * q - p0 * q0 / 2.0)
        })
        .collect();
    StateVector::normalized(grid.clone(), amps)
}

/// Oscillator eigenstate `n` for frequency `omega` and the grid's mass, built
/// with the normalized Hermite-function recursion and renormalized on the grid.
pub fn oscillator_eigenstate(
    grid: &Grid1D,
    omega: f64,
    n: usize,
) -> Result<StateVector, QuantumError> {
    let m_omega = grid.mass() * omega;
    let norm0 = (m_omega / std::f64::consts::PI).powf(0.25);
    let mut prev: Vec<f64> = Vec::new();
    let mut cur: Vec<f64> = grid
        .q_points()
        .iter()
        .map(|&q| {
            let x = m_omega.sqrt() * q;
            norm0 * (-x * x / 2.0).exp()
        })
        .collect();
    for level in 0..n {
        let next: Vec<f64> = grid
            .q_points()
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                let x = m_omega.sqrt() * q;
                let a = x * (2.0 / (level as f64 + 1.0)).sqrt() * cur[i];
                let b = if level == 0 {
                    0.0
                } else {
                    (level as f64 / (level as f64 + 1.0)).sqrt() * prev[i]
                };
                a - b
            })
            .collect();
        prev = std::mem::take(&mut cur);
        cur = next;
    }
    let amps: Array1<C64> = cur.into_iter().map(|v| C64::new(v, 0.0)).collect();
    StateVector::normalized(grid.clone(), amps)
}
