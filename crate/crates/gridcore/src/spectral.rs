//! Centered discrete Fourier transforms.
//!
//! All arrays in this workspace are indexed by the ascending signed index
//! `m = j - N/2`, i.e. element 0 carries the most negative grid point. The
//! centered DFT pair used everywhere is
//!
//! `F_plus[k]  = sum_m f[m] e^{+2 pi i k m / N}`
//! `F_minus[k] = sum_m f[m] e^{-2 pi i k m / N}`
//!
//! with both `k` and `m` running over `-N/2 .. N/2-1`. Implemented as
//! half-rotate, standard FFT, half-rotate, which is exact (the rotations are
//! index permutations, not phase multiplications).

use crate::C64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Rotate a slice left by n/2 in place, swapping the two halves.
fn swap_halves(data: &mut [C64]) {
    let half = data.len() / 2;
    let (a, b) = data.split_at_mut(half);
    a.swap_with_slice(b);
}

fn run_fft(data: &mut [C64], inverse: bool) {
    let len = data.len();
    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        fft.process(data);
    });
}

/// Centered DFT with the `e^{+2 pi i k m / N}` kernel. Unnormalized.
pub fn centered_dft_plus(data: &mut [C64]) {
    assert!(data.len().is_power_of_two());
    swap_halves(data);
    run_fft(data, true);
    swap_halves(data);
}

/// Centered DFT with the `e^{-2 pi i k m / N}` kernel. Unnormalized.
pub fn centered_dft_minus(data: &mut [C64]) {
    assert!(data.len().is_power_of_two());
    swap_halves(data);
    run_fft(data, false);
    swap_halves(data);
}

/// Inverse of [`centered_dft_plus`], including the 1/N normalization.
pub fn centered_idft_plus(data: &mut [C64]) {
    centered_dft_minus(data);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Inverse of [`centered_dft_minus`], including the 1/N normalization.
pub fn centered_idft_minus(data: &mut [C64]) {
    centered_dft_plus(data);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Centered DFT with the half-integer kernel `e^{+2 pi i k (m + 1/2) / N}`.
/// Used by transforms whose sample points sit between grid points.
pub fn centered_dft_plus_half(data: &mut [C64]) {
    let n = data.len();
    centered_dft_plus(data);
    for (idx, v) in data.iter_mut().enumerate() {
        let k = idx as f64 - n as f64 / 2.0;
        let phase = std::f64::consts::PI * k / n as f64;
        *v *= C64::new(phase.cos(), phase.sin());
    }
}

/// Inverse of [`centered_dft_plus_half`], including the 1/N normalization.
pub fn centered_idft_plus_half(data: &mut [C64]) {
    let n = data.len();
    for (idx, v) in data.iter_mut().enumerate() {
        let k = idx as f64 - n as f64 / 2.0;
        let phase = -std::f64::consts::PI * k / n as f64;
        *v *= C64::new(phase.cos(), phase.sin());
    }
    centered_idft_plus(data);
}

/// Direct `O(N^2)` evaluation of the centered transforms, for tests and for
/// sizes that are not powers of two. `sign` is the kernel exponent sign.
pub fn centered_dft_reference(data: &[C64], sign: f64) -> Vec<C64> {
    let n = data.len() as isize;
    (-n / 2..n / 2)
        .map(|k| {
            (-n / 2..n / 2)
                .map(|m| {
                    let angle =
                        sign * 2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64;
                    data[(m + n / 2) as usize] * C64::new(angle.cos(), angle.sin())
                })
                .sum()
        })
        .collect()
}
