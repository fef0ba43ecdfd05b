//! Discretization conventions shared by the whole workspace: the position
//! grid, the derived phase-space and chord grids, centered Fourier helpers,
//! quadrature and the boundary-mass diagnostic.
//!
//! Conventions fixed here, once:
//! * position points `q_i = -L/2 + i*delta` with `delta = L/N`, N a power of two;
//! * momentum points `p_k = pi*k/L` for `k = -N/2 .. N/2-1`. This is half the
//!   Nyquist resolution of the position grid: the `e^{2ipy}` kernel used by the
//!   phase-space transforms doubles every phase, so states must be band-limited
//!   to `|p| < pi*N/(2L)`;
//! * chord points `xi_q = 2*delta*j`, `xi_p = (2*pi/L)*k`. Each chord axis is the
//!   exact DFT conjugate of its phase-space partner under the symplectic pairing
//!   `<x,xi>_s = q*xi_p - xi_q*p`, which makes the symplectic transform exactly
//!   invertible and puts every `xi/2` offset on the phase grid itself;
//! * double integrals are uniform-weight sums times the cell area (spectrally
//!   accurate for the smooth, decaying integrands this workspace deals in);
//! * values requested outside the box are zero, and callers are expected to
//!   reject states whose boundary mass exceeds [`BOUNDARY_MASS_TOL`].

pub mod interp;
pub mod spectral;

use thiserror::Error;

pub use num_complex::Complex64 as C64;

/// Mass fraction in the outer region of the box above which states are
/// considered to touch the boundary and are rejected by transform code.
pub const BOUNDARY_MASS_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid size {0} must be a power of two, at least 8")]
    BadSize(usize),
    #[error("box length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("mass must be positive and finite, got {0}")]
    BadMass(f64),
}

/// Uniform position grid on `[-L/2, L/2)` together with the particle mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n: usize,
    length: f64,
    mass: f64,
    q: Vec<f64>,
}

impl Grid1D {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Grid spacing `delta = L/N`.
    pub fn delta(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn q_points(&self) -> &[f64] {
        &self.q
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q[i]
    }

    /// Full-resolution momentum set `2*pi*k/L`, `k = -N/2 .. N/2-1`, ascending.
    /// This is the set the kinetic operator resolves; the phase-space grid only
    /// covers the inner half of it.
    pub fn full_momentum_points(&self) -> Vec<f64> {
        let n = self.n as isize;
        (-n / 2..n / 2)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / self.length)
            .collect()
    }

    /// `sum |psi_i|^2 * delta` over the outer 1/16 of the box on each side.
    pub fn boundary_mass(&self, amplitudes: &[C64]) -> f64 {
        assert_eq!(amplitudes.len(), self.n);
        let edge = self.n / 16;
        let delta = self.delta();
        let mut s = 0.0;
        for i in 0..edge {
            s += amplitudes[i].norm_sqr();
            s += amplitudes[self.n - 1 - i].norm_sqr();
        }
        s * delta
    }

    /// `sum f_i * delta`, the position-space quadrature rule.
    pub fn integrate_q(&self, values: &[C64]) -> C64 {
        assert_eq!(values.len(), self.n);
        values.iter().sum::<C64>() * self.delta()
    }
}

/// Build a position grid. `n` must be a power of two, at least 8.
pub fn make_grid(n: usize, length: f64, mass: f64) -> Result<Grid1D, GridError> {
    if n < 8 || !n.is_power_of_two() {
        return Err(GridError::BadSize(n));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(GridError::BadLength(length));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(GridError::BadMass(mass));
    }
    let delta = length / n as f64;
    let q = (0..n).map(|i| -length / 2.0 + i as f64 * delta).collect();
    Ok(Grid1D {
        n,
        length,
        mass,
        q,
    })
}

/// Phase-space grid `(q_i, p_k)` derived from a position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    base: Grid1D,
    p: Vec<f64>,
    cell_area: f64,
}

impl PhaseGrid {
    pub fn new(base: Grid1D) -> Self {
        let n = base.n as isize;
        let p = (-n / 2..n / 2)
            .map(|k| std::f64::consts::PI * k as f64 / base.length)
            .collect();
        let cell_area = base.delta() * std::f64::consts::PI / base.length;
        PhaseGrid {
            base,
            p,
            cell_area,
        }
    }

    pub fn base(&self) -> &Grid1D {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn p_points(&self) -> &[f64] {
        &self.p
    }

    pub fn p(&self, k: usize) -> f64 {
        self.p[k]
    }

    /// p-grid spacing `pi/L`.
    pub fn dp(&self) -> f64 {
        std::f64::consts::PI / self.base.length
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    /// `sum f(q_i, p_k) * cell_area`, the phase-space quadrature rule.
    pub fn integrate<'a, I>(&self, values: I) -> C64
    where
        I: IntoIterator<Item = &'a C64>,
    {
        values.into_iter().sum::<C64>() * self.cell_area
    }
}

/// Chord (displacement) grid conjugate to a [`PhaseGrid`] under the
/// symplectic pairing. Spacings are twice the phase-space ones so that the
/// symplectic Fourier transform is an exact N-point DFT per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordGrid {
    xi_q: Vec<f64>,
    xi_p: Vec<f64>,
    cell_area: f64,
}

impl ChordGrid {
    pub fn new(base: &Grid1D) -> Self {
        let n = base.n as isize;
        let dxq = 2.0 * base.delta();
        let dxp = 2.0 * std::f64::consts::PI / base.length;
        let xi_q = (-n / 2..n / 2).map(|j| dxq * j as f64).collect();
        let xi_p = (-n / 2..n / 2).map(|k| dxp * k as f64).collect();
        ChordGrid {
            xi_q,
            xi_p,
            cell_area: dxq * dxp,
        }
    }

    pub fn n(&self) -> usize {
        self.xi_q.len()
    }

    pub fn xi_q_points(&self) -> &[f64] {
        &self.xi_q
    }

    pub fn xi_p_points(&self) -> &[f64] {
        &self.xi_p
    }

    pub fn xi_q(&self, j: usize) -> f64 {
        self.xi_q[j]
    }

    pub fn xi_p(&self, k: usize) -> f64 {
        self.xi_p[k]
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }
}

/// Symplectic pairing `<x, xi>_s = q*xi_p - xi_q*p`.
///
/// Antisymmetric when both arguments are read as phase points:
/// `symplectic_product(x, y) = -symplectic_product(y, x)`.
pub fn symplectic_product(x: (f64, f64), xi: (f64, f64)) -> f64 {
    x.0 * xi.1 - xi.0 * x.1
}
