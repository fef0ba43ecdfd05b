//! Star-product algebra on phase-space fields.
//!
//! The product is computed by the operator route: quantize both operands,
//! multiply the matrices, transform the product back. At grid resolution
//! this is exact and free of the divergence a truncated derivative expansion
//! develops at higher orders. A brute-force quadrature of the double
//! phase-space integral form is kept as an independent reference for small
//! grids.
//!
//! Operands must carry matching normalization tags. Values always compose
//! literally: the product of two `Wigner`-tagged fields is the pointwise
//! star of the stored values, which is what makes the chain projector
//! algebra close with its `1/(2 pi)` weight.

use ndarray::Array2;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

use gridcore::{Grid1D, PhaseGrid, C64};
use wigner::{weyl_quantize, weyl_transform, KrylovPhaseSet, Normalization, PhaseField};

#[derive(Debug, Error)]
pub enum MoyalError {
    #[error("operand normalizations differ: {left:?} vs {right:?}")]
    NormalizationMismatch {
        left: Normalization,
        right: Normalization,
    },
    #[error("operand grids differ")]
    GridMismatch,
    #[error("chain index {n} out of range for dimension {dim}")]
    IndexOutOfRange { n: usize, dim: usize },
}

/// Classical Hamiltonian field `p^2/2m + V(q)` sampled on the grid's phase
/// plane, in symbol normalization. Star relations against chain fields hold
/// for this field directly; the transform of the kinetic circulant picks up
/// edge-row artifacts and is not used.
pub fn classical_hamiltonian_field(
    grid: &Grid1D,
    potential: impl Fn(f64) -> f64,
) -> PhaseField {
    let pg = PhaseGrid::new(grid.clone());
    let n = pg.n();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        let v = potential(grid.q(i));
        for k in 0..n {
            let p = pg.p(k);
            values[[i, k]] = C64::new(p * p / (2.0 * grid.mass()) + v, 0.0);
        }
    }
    PhaseField::new(pg, values, Normalization::Symbol).expect("square field")
}

fn check_pair(a: &PhaseField, b: &PhaseField) -> Result<(), MoyalError> {
    if a.grid() != b.grid() {
        return Err(MoyalError::GridMismatch);
    }
    if a.normalization() != b.normalization() {
        return Err(MoyalError::NormalizationMismatch {
            left: a.normalization(),
            right: b.normalization(),
        });
    }
    Ok(())
}

/// Reads the stored values at symbol scale regardless of tag.
fn as_symbol(f: &PhaseField) -> PhaseField {
    PhaseField::new(f.grid().clone(), f.values().clone(), Normalization::Symbol)
        .expect("shape preserved")
}

/// Star of the stored values by the operator route, returned under `tag`.
fn star_tagged(a: &PhaseField, b: &PhaseField, tag: Normalization) -> PhaseField {
    let op = weyl_quantize(&as_symbol(a)).matmul(&weyl_quantize(&as_symbol(b)));
    let sym = weyl_transform(&op);
    PhaseField::new(sym.grid().clone(), sym.values().clone(), tag).expect("shape preserved")
}

/// Star product of two fields; non-commutative in general. The operands must
/// carry the same normalization tag, which the result keeps.
pub fn star(a: &PhaseField, b: &PhaseField) -> Result<PhaseField, MoyalError> {
    check_pair(a, b)?;
    Ok(star_tagged(a, b, a.normalization()))
}

/// Star commutator `A (star) B - B (star) A`; antisymmetric. For quadratic
/// symbols its state-weighted averages reduce to `i` times the Poisson
/// bracket; pointwise equality cannot survive the momentum window (the
/// commutator of finite matrices is traceless, so its symbol must integrate
/// to zero while the Poisson image need not).
pub fn moyal_bracket(a: &PhaseField, b: &PhaseField) -> Result<PhaseField, MoyalError> {
    check_pair(a, b)?;
    let op = weyl_quantize(&as_symbol(a)).commutator(&weyl_quantize(&as_symbol(b)));
    let sym = weyl_transform(&op);
    Ok(PhaseField::new(sym.grid().clone(), sym.values().clone(), a.normalization())
        .expect("shape preserved"))
}

/// Residual of the star-genvalue relations for an eigenpair field:
/// `max|H (star) W_ab - E_a W_ab| + max|W_ab (star) H - E_b W_ab|`.
/// The Hamiltonian field is read at symbol scale; the relation is linear in
/// `W_ab`, so its tag only sets the overall scale of the residual.
pub fn star_genvalue_residual(
    h_field: &PhaseField,
    w_ab: &PhaseField,
    e_a: f64,
    e_b: f64,
) -> f64 {
    let left = star_tagged(h_field, w_ab, w_ab.normalization());
    let right = star_tagged(w_ab, h_field, w_ab.normalization());
    let mut dev_left = 0.0f64;
    let mut dev_right = 0.0f64;
    for ((l, r), w) in left
        .values()
        .iter()
        .zip(right.values().iter())
        .zip(w_ab.values().iter())
    {
        dev_left = dev_left.max((l - w * e_a).norm());
        dev_right = dev_right.max((r - w * e_b).norm());
    }
    dev_left + dev_right
}

/// One step of the chain recursion in phase space:
/// `H (star) W[n][n] - a_n W[n][n] - b_n W[n-1][n]`. While the chain is not
/// exhausted this equals `b_{n+1} W[n+1][n]`, so the next chain field is
/// reachable without ever leaving the phase plane; on a closed chain it
/// vanishes.
pub fn star_lanczos_step(
    h_field: &PhaseField,
    set: &KrylovPhaseSet,
    n: usize,
) -> Result<PhaseField, MoyalError> {
    let dim = set.dim();
    if n >= dim {
        return Err(MoyalError::IndexOutOfRange { n, dim });
    }
    let w_nn = set.field(n, n);
    let prod = star_tagged(h_field, w_nn, w_nn.normalization());
    let a_n = set.a()[n];
    let mut values = prod.values().clone();
    values.zip_mut_with(w_nn.values(), |v, w| *v -= w * a_n);
    if n > 0 {
        let b_n = set.b()[n];
        values.zip_mut_with(set.field(n - 1, n).values(), |v, w| *v -= w * b_n);
    }
    Ok(PhaseField::new(prod.grid().clone(), values, w_nn.normalization())
        .expect("shape preserved"))
}

/// Lanczos coefficients read off the chain fields by plain phase-space
/// integrals: `a_n` integrates `H` against `W[n][n]`, the couplings integrate
/// it against `W[n][n-1]`. Returns `(a_0..a_{D-1}, b_1..b_{D-1})`; the
/// coupling list is empty for a one-element chain.
pub fn lanczos_coeffs_from_phase(
    h_field: &PhaseField,
    set: &KrylovPhaseSet,
) -> (Vec<f64>, Vec<f64>) {
    let d = set.dim();
    let a = (0..d)
        .map(|n| h_field.integrate_product(set.field(n, n)).re)
        .collect();
    let b = (1..d)
        .map(|n| h_field.integrate_product(set.field(n, n - 1)).re)
        .collect();
    (a, b)
}

/// Star product by direct quadrature of the double phase-space integral
/// `(A (star) B)(x) = (1/pi^2) integral dx1 dx2 A(x1) B(x2)
/// exp(2i [<x,x1> + <x1,x2> + <x2,x>])` with the symplectic products over
/// grid cells. Cost grows as the fifth power of the grid size; meant as an
/// independent reference for small grids.
pub fn star_integral_reference(
    a: &PhaseField,
    b: &PhaseField,
) -> Result<PhaseField, MoyalError> {
    check_pair(a, b)?;
    let grid = a.grid().clone();
    let n = grid.n();
    // u[[i, k]] = exp(2 i q_i p_k); every pair phase factors through it:
    // exp(2 i <x, y>) = u[[i_x, k_y]] conj(u[[i_y, k_x]]).
    let mut u = Array2::zeros((n, n));
    for i in 0..n {
        for k in 0..n {
            let angle = 2.0 * grid.base().q(i) * grid.p(k);
            u[[i, k]] = C64::new(angle.cos(), angle.sin());
        }
    }
    let cell = grid.cell_area();
    let prefactor = cell * cell / (PI * PI);
    let av = a.values();
    let bv = b.values();
    let out: Vec<C64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let i = idx / n;
            let k = idx % n;
            let mut acc = C64::new(0.0, 0.0);
            let mut row = vec![C64::new(0.0, 0.0); n];
            for i1 in 0..n {
                // row[i2] = sum_{k2} B[i2, k2] exp(2i q_{i1} p_{k2}) exp(-2i q_i p_{k2})
                for (i2, r) in row.iter_mut().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    for k2 in 0..n {
                        s += bv[[i2, k2]] * u[[i1, k2]] * u[[i, k2]].conj();
                    }
                    *r = s;
                }
                for k1 in 0..n {
                    let mut inner = C64::new(0.0, 0.0);
                    for (i2, r) in row.iter().enumerate() {
                        inner += u[[i2, k1]].conj() * u[[i2, k]] * r;
                    }
                    acc += av[[i1, k1]] * u[[i, k1]] * u[[i1, k]].conj() * inner;
                }
            }
            acc * prefactor
        })
        .collect();
    let values = Array2::from_shape_vec((n, n), out).expect("row-major layout");
    Ok(PhaseField::new(grid, values, a.normalization()).expect("square field"))
}
