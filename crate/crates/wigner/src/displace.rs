//! Phase-space displacement and displaced-parity operators on the grid.

use crate::WignerError;
use gridcore::{Grid1D, C64};
use ndarray::Array2;
use quantum::OperatorMatrix;
use std::f64::consts::PI;

fn grid_multiple(value: f64, unit: f64) -> Result<i64, WignerError> {
    let ratio = value / unit;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 {
        return Err(WignerError::OffGridPoint { value, unit });
    }
    Ok(rounded as i64)
}

/// Displacement by the chord `(xi_q, xi_p)`: kets move as
/// `|y> -> |y + xi_q> exp(i xi_p (y + xi_q / 2))`, with periodic wrap at the
/// box edge. `xi_q` must be a multiple of the cell `delta` and `xi_p` a
/// multiple of `2 pi / L`, which makes the wrap phase exact and the matrix
/// exactly unitary.
pub fn displacement_operator(
    grid: &Grid1D,
    xi_q: f64,
    xi_p: f64,
) -> Result<OperatorMatrix, WignerError> {
    let n = grid.n();
    let shift = grid_multiple(xi_q, grid.delta())?;
    grid_multiple(xi_p, 2.0 * PI / grid.length())?;

    let mut mat: Array2<C64> = Array2::zeros((n, n));
    for b in 0..n {
        let target = (b as i64 + shift).rem_euclid(n as i64) as usize;
        let phase = xi_p * (grid.q(b) + 0.5 * xi_q);
        mat[[target, b]] = C64::new(0.0, phase).exp();
    }
    Ok(OperatorMatrix::new(grid.clone(), mat, false).expect("square matrix"))
}

/// Parity about the phase-space point `(q0, p0)`: kets reflect as
/// `|y> -> |2 q0 - y> exp(2 i p0 (q0 - y))`. `q0` must sit on the grid or the
/// half-grid (`delta / 2` multiples) and `p0` on the momentum grid
/// (`pi / L` multiples); both keep the wrapped reflection exactly Hermitian
/// and involutive.
pub fn parity_operator(grid: &Grid1D, q0: f64, p0: f64) -> Result<OperatorMatrix, WignerError> {
    let n = grid.n();
    let c = grid_multiple(q0, 0.5 * grid.delta())?;
    grid_multiple(p0, PI / grid.length())?;

    let mut mat: Array2<C64> = Array2::zeros((n, n));
    for b in 0..n {
        // Target index solves q_t = 2 q0 - q_b, wrapped into the box:
        // with q0 = c delta / 2 this is slot c - b modulo N.
        let t = (c - b as i64).rem_euclid(n as i64) as usize;
        let phase = 2.0 * p0 * (q0 - grid.q(b));
        mat[[t, b]] = C64::new(0.0, phase).exp();
    }
    Ok(OperatorMatrix::new(grid.clone(), mat, true).expect("hermitian reflection"))
}
