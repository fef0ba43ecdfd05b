//! Interpolation for half-cell shifts.
//!
//! The two-parity Weyl transform produces one channel sampled at integer cell
//! centers and one at half-integer centers; merging them needs values shifted
//! by half a cell. Two shift flavors cover the two operand classes:
//!
//! * [`interp_shift`] slides a local Lagrange stencil, exact for polynomial
//!   rows of degree below the stencil size and free of any periodicity
//!   assumption. Its error on oscillatory rows grows with frequency and no
//!   stencil order converges at the grid band edge.
//! * [`confined_shift`] splits a row into the polynomial through a few
//!   edge-anchored nodes (shifted exactly by evaluation) plus a residual that
//!   vanishes at those nodes and is shifted spectrally, which is exact for
//!   band-limited content. Symbols of confined operators decay at the box
//!   ends, so the wrap the spectral step implies costs nothing there.

use crate::spectral::{centered_dft_minus, centered_idft_minus};
use crate::C64;

const STENCIL: usize = 14;

/// Weights for evaluating the degree-`m - 1` interpolant at offset `t` (in
/// cells) from stencil position `base`, where the stencil holds samples at
/// offsets `0..m` relative to `base`. Only the first `m` entries are set.
fn lagrange_weights(t: f64, m: usize) -> [f64; STENCIL] {
    let mut w = [0.0; STENCIL];
    for (j, wj) in w.iter_mut().enumerate().take(m) {
        let mut num = 1.0;
        let mut den = 1.0;
        for k in 0..m {
            if k != j {
                num *= t - k as f64;
                den *= j as f64 - k as f64;
            }
        }
        *wj = num / den;
    }
    w
}

/// Resample `data` at points shifted by `shift` cells: output index `i` holds
/// the interpolated value of the field at position `i + shift`. The stencil
/// slides to stay inside the array near the edges (one-sided there), so no
/// periodic wrap is ever applied.
pub fn interp_shift(data: &[C64], shift: f64) -> Vec<C64> {
    let n = data.len();
    let m = n.min(STENCIL);
    assert!(m >= 2, "need at least 2 samples");
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = i as f64 + shift;
        // Center the stencil on x, then clamp it into the array.
        let mut base = (x.floor() as isize) - (m as isize / 2 - 1);
        base = base.clamp(0, n as isize - m as isize);
        let w = lagrange_weights(x - base as f64, m);
        let mut acc = C64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate().take(m) {
            acc += data[base as usize + j] * *wj;
        }
        out.push(acc);
    }
    out
}

/// Nodes anchoring the polynomial trend in [`confined_shift`]: three cells at
/// each end of the row, fixing a degree-5 polynomial.
const TREND_NODES: usize = 6;

/// Resample `data` (power-of-two length, at least 8) at points shifted by
/// `shift` cells. The degree-5 polynomial through three nodes at each end is
/// shifted exactly by evaluation; the remainder vanishes at those nodes, so
/// its periodic extension is continuous and a spectral shift moves it without
/// edge artifacts. Exact for polynomial rows of degree at most 5, for
/// band-limited confined rows, and for sums of the two.
pub fn confined_shift(data: &[C64], shift: f64) -> Vec<C64> {
    let n = data.len();
    assert!(n >= 8 && n.is_power_of_two(), "need a power-of-two row, at least 8");
    let xs: [f64; TREND_NODES] = [
        0.0,
        1.0,
        2.0,
        (n - 3) as f64,
        (n - 2) as f64,
        (n - 1) as f64,
    ];
    let node_values: [C64; TREND_NODES] = [
        data[0],
        data[1],
        data[2],
        data[n - 3],
        data[n - 2],
        data[n - 1],
    ];
    let trend = |x: f64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..TREND_NODES {
            let mut basis = 1.0;
            for k in 0..TREND_NODES {
                if k != j {
                    basis *= (x - xs[k]) / (xs[j] - xs[k]);
                }
            }
            acc += node_values[j] * basis;
        }
        acc
    };

    let mut residual: Vec<C64> = (0..n).map(|i| data[i] - trend(i as f64)).collect();
    centered_dft_minus(&mut residual);
    for (idx, v) in residual.iter_mut().enumerate() {
        let k = idx as f64 - n as f64 / 2.0;
        let angle = 2.0 * std::f64::consts::PI * k * shift / n as f64;
        // Index 0 is the unpaired band-edge bin; a complex phase there would
        // break the conjugate symmetry that pairs rows of Hermitian data, so
        // it keeps only its cosine projection.
        if idx == 0 {
            *v *= angle.cos();
        } else {
            *v *= C64::new(angle.cos(), angle.sin());
        }
    }
    centered_idft_minus(&mut residual);

    residual
        .into_iter()
        .enumerate()
        .map(|(i, r)| r + trend(i as f64 + shift))
        .collect()
}
