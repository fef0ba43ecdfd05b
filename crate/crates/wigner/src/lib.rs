//! Phase-space fields over the `(q_i, p_k)` grid: Weyl symbols of operators,
//! Wigner functions of states, and the field family attached to a Krylov
//! basis.
//!
//! A matrix splits into anti-diagonals centered at integer and half-integer
//! cell positions. Each parity channel is a centered DFT of one family of
//! anti-diagonals; the public field is the average of the even channel and
//! the odd channel resampled onto integer centers. Band-limited content
//! enters both channels identically while the half-window alias enters them
//! with opposite sign, so the average is alias-free and the (sum, difference)
//! pair recovers both channels exactly when quantizing.

mod chord;
mod displace;
mod io;

pub use chord::characteristic_function;
pub use displace::{displacement_operator, parity_operator};

use gridcore::spectral::{
    centered_dft_plus, centered_dft_plus_half, centered_idft_plus, centered_idft_plus_half,
};
use gridcore::{interp::confined_shift, PhaseGrid, C64, BOUNDARY_MASS_TOL};
use krylov::KrylovStateBasis;
use ndarray::Array2;
use quantum::{OperatorMatrix, StateVector};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WignerError {
    #[error("field shape {got:?} does not match grid size {want}")]
    BadShape { got: (usize, usize), want: usize },
    #[error("state carries boundary mass {0:e} above the confinement threshold")]
    BoundaryMass(f64),
    #[error("expected {expected:?} normalization, got {got:?}")]
    NormalizationMismatch {
        expected: Normalization,
        got: Normalization,
    },
    #[error("point component {value} is not a multiple of the grid unit {unit}")]
    OffGridPoint { value: f64, unit: f64 },
    #[error("basis truncation tail {0:e} exceeds 1e-10")]
    TruncationTail(f64),
    #[error("conjugate-pair deviation {0:e} across the field set")]
    ConjugacyBroken(f64),
}

/// Scale convention carried by a field: `Symbol` integrates to `2 pi Tr`,
/// `Wigner` is the symbol divided by `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Symbol,
    Wigner,
}

/// Complex field on the phase-space grid, indexed `[q index, p index]`.
#[derive(Debug, Clone)]
pub struct PhaseField {
    grid: PhaseGrid,
    values: Array2<C64>,
    normalization: Normalization,
}

impl PhaseField {
    pub fn new(
        grid: PhaseGrid,
        values: Array2<C64>,
        normalization: Normalization,
    ) -> Result<Self, WignerError> {
        let n = grid.n();
        if values.dim() != (n, n) {
            return Err(WignerError::BadShape {
                got: values.dim(),
                want: n,
            });
        }
        Ok(PhaseField {
            grid,
            values,
            normalization,
        })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<C64> {
        &self.values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Field value at `(q_i, p_k)`.
    pub fn value(&self, i: usize, k: usize) -> C64 {
        self.values[[i, k]]
    }

    /// Cell-weighted sum over the whole grid.
    pub fn integrate(&self) -> C64 {
        self.grid.integrate(self.values.iter())
    }

    /// Integral of `self * conj(other)`; grids must match.
    pub fn inner(&self, other: &PhaseField) -> C64 {
        assert_eq!(self.grid, other.grid, "phase grids differ");
        let s: C64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        s * self.grid.cell_area()
    }

    /// Integral of the plain pointwise product `self * other`.
    pub fn integrate_product(&self, other: &PhaseField) -> C64 {
        assert_eq!(self.grid, other.grid, "phase grids differ");
        let s: C64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum();
        s * self.grid.cell_area()
    }

    /// Distribution over `q`: sums out the momentum axis with weight `dp`.
    pub fn marginal_q(&self) -> Vec<C64> {
        let dp = self.grid.dp();
        self.values
            .rows()
            .into_iter()
            .map(|row| row.sum() * dp)
            .collect()
    }

    /// Distribution over `p`: sums out the position axis with weight `delta`.
    pub fn marginal_p(&self) -> Vec<C64> {
        let dq = self.grid.base().delta();
        self.values
            .columns()
            .into_iter()
            .map(|col| col.sum() * dq)
            .collect()
    }

    /// Largest imaginary part relative to the largest magnitude on the field.
    pub fn reality_deviation(&self) -> f64 {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let dev = self
            .values
            .iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max);
        dev / scale.max(f64::MIN_POSITIVE)
    }

    pub fn scaled(&self, c: C64) -> PhaseField {
        PhaseField {
            grid: self.grid.clone(),
            values: self.values.mapv(|v| v * c),
            normalization: self.normalization,
        }
    }

    fn retag(mut self, normalization: Normalization) -> PhaseField {
        self.normalization = normalization;
        self
    }
}

/// Even-parity channel: for each integer center `i` the anti-diagonal
/// `2 * mat[i-m, i+m]` is transformed with the plus-sign centered DFT.
fn even_channel(mat: &Array2<C64>, n: usize) -> Array2<C64> {
    let mut out = Array2::zeros((n, n));
    let mut row = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        row.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let reach = i.min(n - 1 - i) as isize;
        for m in -reach..=reach {
            let a = (i as isize - m) as usize;
            let b = (i as isize + m) as usize;
            row[(m + n as isize / 2) as usize] = 2.0 * mat[[a, b]];
        }
        centered_dft_plus(&mut row);
        for k in 0..n {
            out[[i, k]] = row[k];
        }
    }
    out
}

/// Odd-parity channel: for each half-integer center `j + 1/2` the
/// anti-diagonal `2 * mat[j-m, j+1+m]` is transformed with the half-sample
/// centered DFT, which evaluates momenta at offsets `m + 1/2`.
fn odd_channel(mat: &Array2<C64>, n: usize) -> Array2<C64> {
    let mut out = Array2::zeros((n, n));
    let mut row = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        row.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let (lo, hi) = odd_reach(j, n);
        for m in lo..=hi {
            let a = (j as isize - m) as usize;
            let b = (j as isize + 1 + m) as usize;
            row[(m + n as isize / 2) as usize] = 2.0 * mat[[a, b]];
        }
        centered_dft_plus_half(&mut row);
        for k in 0..n {
            out[[j, k]] = row[k];
        }
    }
    out
}

/// Valid offset range for the anti-diagonal through the half-integer center
/// `j + 1/2`: both matrix indices `j - m` and `j + 1 + m` stay inside the box
/// and the slot `m + N/2` stays inside the row.
fn odd_reach(j: usize, n: usize) -> (isize, isize) {
    let j = j as isize;
    let n = n as isize;
    let lo = (-j - 1).max(j - n + 1).max(-n / 2);
    let hi = j.min(n - 2 - j).min(n / 2 - 1);
    (lo, hi)
}

/// Resample every momentum column along the position axis by `shift` cells.
fn shift_q_axis(values: &Array2<C64>, shift: f64) -> Array2<C64> {
    let (n, _) = values.dim();
    let mut out = Array2::zeros(values.raw_dim());
    let mut col = vec![C64::new(0.0, 0.0); n];
    for k in 0..values.dim().1 {
        for i in 0..n {
            col[i] = values[[i, k]];
        }
        let shifted = confined_shift(&col, shift);
        for i in 0..n {
            out[[i, k]] = shifted[i];
        }
    }
    out
}

/// Weyl symbol of an operator: `O(q_i, p_k) = 2 sum_y exp(2 i p_k y) K(q_i - y, q_i + y)`
/// with the matrix kernel sampled on both anti-diagonal parities and merged
/// onto integer centers. Returned with `Symbol` normalization.
pub fn weyl_transform(op: &OperatorMatrix) -> PhaseField {
    let grid = op.grid().clone();
    let n = grid.n();
    let even = even_channel(op.entries(), n);
    let odd = odd_channel(op.entries(), n);
    let odd_at_int = shift_q_axis(&odd, -0.5);
    let values = (&even + &odd_at_int).mapv(|v| v * 0.5);
    PhaseField {
        grid: PhaseGrid::new(grid),
        values,
        normalization: Normalization::Symbol,
    }
}

/// Inverse of `weyl_transform` on operators confined to the box and to the
/// momentum window: the field is read as the symbol on integer centers,
/// resampled onto half-integer centers for the odd anti-diagonals, and each
/// center row is inverted by an exact DFT. A `Wigner` field is rescaled by
/// `2 pi` first.
///
/// Fields with momentum content at the window edge quantize to the
/// band-limited version of the nominal operator: the constant field maps to
/// the momentum-window projector, which acts as the identity on every state
/// the grid can represent faithfully.
pub fn weyl_quantize(field: &PhaseField) -> OperatorMatrix {
    let grid = field.grid.base().clone();
    let n = grid.n();
    let vals = match field.normalization {
        Normalization::Symbol => field.values.clone(),
        Normalization::Wigner => field.values.mapv(|v| v * (2.0 * PI)),
    };
    let even = &vals;
    let odd = shift_q_axis(&vals, 0.5);

    let mut mat = Array2::zeros((n, n));
    let mut row = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        for k in 0..n {
            row[k] = even[[i, k]];
        }
        centered_idft_plus(&mut row);
        let reach = i.min(n - 1 - i) as isize;
        for m in -reach..=reach {
            let a = (i as isize - m) as usize;
            let b = (i as isize + m) as usize;
            mat[[a, b]] = row[(m + n as isize / 2) as usize] * 0.5;
        }
    }
    for j in 0..n {
        for k in 0..n {
            row[k] = odd[[j, k]];
        }
        centered_idft_plus_half(&mut row);
        let (lo, hi) = odd_reach(j, n);
        for m in lo..=hi {
            let a = (j as isize - m) as usize;
            let b = (j as isize + 1 + m) as usize;
            mat[[a, b]] = row[(m + n as isize / 2) as usize] * 0.5;
        }
    }
    match OperatorMatrix::new(grid.clone(), mat.clone(), true) {
        Ok(op) => op,
        Err(_) => OperatorMatrix::new(grid, mat, false).expect("square matrix"),
    }
}

fn require_confined(psi: &StateVector) -> Result<(), WignerError> {
    let mass = psi.grid().boundary_mass(psi.amplitudes().as_slice().unwrap());
    if mass > BOUNDARY_MASS_TOL {
        return Err(WignerError::BoundaryMass(mass));
    }
    Ok(())
}

/// Wigner function of a pure state: the symbol of its density dyad divided
/// by `2 pi`. The state must be confined away from the box edge.
pub fn wigner_of_state(psi: &StateVector) -> Result<PhaseField, WignerError> {
    require_confined(psi)?;
    let rho = OperatorMatrix::dyad(psi, psi);
    Ok(weyl_transform(&rho).scaled(C64::new(1.0 / (2.0 * PI), 0.0)).retag(Normalization::Wigner))
}

/// Cross-Wigner field of an ordered state pair: the transform of
/// `|left><right|` divided by `2 pi`; `left` enters at `q - y`.
pub fn wigner_of_pair(
    left: &StateVector,
    right: &StateVector,
) -> Result<PhaseField, WignerError> {
    require_confined(left)?;
    require_confined(right)?;
    let dyad = OperatorMatrix::dyad(left, right);
    Ok(weyl_transform(&dyad).scaled(C64::new(1.0 / (2.0 * PI), 0.0)).retag(Normalization::Wigner))
}

/// Wigner fields of every ordered pair of Krylov basis vectors, with the
/// chain coefficients carried along.
#[derive(Debug, Clone)]
pub struct KrylovPhaseSet {
    dim: usize,
    fields: Vec<PhaseField>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl KrylovPhaseSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Field of the pair `|K_n><K_m|` scaled to `Wigner` normalization.
    pub fn field(&self, n: usize, m: usize) -> &PhaseField {
        &self.fields[n * self.dim + m]
    }

    pub fn grid(&self) -> &PhaseGrid {
        self.fields[0].grid()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Build the `D_K x D_K` field set for a Krylov basis. Fields of swapped
/// index pairs must be complex conjugates; the set is rejected if the
/// deviation exceeds `1e-9` of the field scale.
///
/// The antisymmetrized neighbor combination `(T[n][n+1] - T[n+1][n]) / 2`
/// equals the transform of `[P_n, H] - 2 b_n P_[n,n-1]` scaled by
/// `1 / (4 pi b_{n+1})`; the matching prefactor is real, not imaginary.
pub fn krylov_phase_set(basis: &KrylovStateBasis) -> Result<KrylovPhaseSet, WignerError> {
    let d = basis.dim();
    for v in basis.vectors() {
        require_confined(v)?;
    }
    let fields: Result<Vec<PhaseField>, WignerError> = (0..d * d)
        .into_par_iter()
        .map(|idx| wigner_of_pair(basis.vector(idx / d), basis.vector(idx % d)))
        .collect();
    let fields = fields?;

    let mut scale = 0.0f64;
    let mut dev = 0.0f64;
    for n in 0..d {
        for m in 0..=n {
            let fnm = &fields[n * d + m];
            let fmn = &fields[m * d + n];
            for (x, y) in fnm.values.iter().zip(fmn.values.iter()) {
                scale = scale.max(x.norm());
                dev = dev.max((x - y.conj()).norm());
            }
        }
    }
    if dev > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(WignerError::ConjugacyBroken(dev / scale));
    }

    Ok(KrylovPhaseSet {
        dim: d,
        fields,
        a: basis.a().to_vec(),
        b: basis.b().to_vec(),
    })
}

/// Spreading kernel of the set: `2 pi sum_n n T[n][n]`, the symbol of the
/// chain position operator. Returned with `Symbol` normalization.
pub fn spreading_kernel(set: &KrylovPhaseSet) -> PhaseField {
    let grid = set.grid().clone();
    let n = grid.n();
    let mut values: Array2<C64> = Array2::zeros((n, n));
    for level in 1..set.dim() {
        let f = set.field(level, level);
        values.zip_mut_with(&f.values, |acc, v| {
            *acc += v * (2.0 * PI * level as f64);
        });
    }
    PhaseField {
        grid,
        values,
        normalization: Normalization::Symbol,
    }
}

/// Largest single weight `|mu|^j / sqrt(j!)` over indices `j >= d`.
fn weight_sup(mu_abs: f64, d: usize) -> f64 {
    let mut term = 1.0f64;
    for j in 1..=d {
        term *= mu_abs / (j as f64).sqrt();
    }
    let mut sup = term;
    let mut j = d + 1;
    let mut t = term;
    while j < d + 400 {
        t *= mu_abs / (j as f64).sqrt();
        sup = sup.max(t);
        if (j as f64).sqrt() > 2.0 * mu_abs && t < sup * 1e-6 {
            break;
        }
        j += 1;
    }
    sup
}

/// Sum of the weight series `sum_j |mu|^j / sqrt(j!)`.
fn weight_sum(mu_abs: f64) -> f64 {
    let mut total = 1.0f64;
    let mut term = 1.0f64;
    let mut j = 1usize;
    while j < 600 {
        term *= mu_abs / (j as f64).sqrt();
        total += term;
        if term < 1e-18 * total {
            break;
        }
        j += 1;
    }
    total
}

/// Two-parameter generating field `G(mu; x) = sum_{m,n} mu1^m mu2^n
/// / sqrt(m! n!) T[n][m]`, truncated at the set dimension. The discarded
/// tail weight must stay below `1e-10`.
pub fn generating_function(
    set: &KrylovPhaseSet,
    mu1: C64,
    mu2: C64,
) -> Result<PhaseField, WignerError> {
    let d = set.dim();
    let tail = weight_sup(mu1.norm(), d) * weight_sum(mu2.norm())
        + weight_sup(mu2.norm(), d) * weight_sum(mu1.norm());
    if tail > 1e-10 {
        return Err(WignerError::TruncationTail(tail));
    }

    let grid = set.grid().clone();
    let n = grid.n();
    let mut values: Array2<C64> = Array2::zeros((n, n));
    let mut w1 = C64::new(1.0, 0.0);
    for m in 0..d {
        if m > 0 {
            w1 *= mu1 / (m as f64).sqrt();
        }
        let mut w2 = C64::new(1.0, 0.0);
        for nn in 0..d {
            if nn > 0 {
                w2 *= mu2 / (nn as f64).sqrt();
            }
            let coeff = w1 * w2;
            values.zip_mut_with(&set.field(nn, m).values, |acc, v| {
                *acc += v * coeff;
            });
        }
    }
    Ok(PhaseField {
        grid,
        values,
        normalization: Normalization::Wigner,
    })
}
