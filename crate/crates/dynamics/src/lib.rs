//! Time evolution of phase-space distributions.
//!
//! Three routes to the same time derivative, kept deliberately independent so
//! they can cross-check each other:
//!
//! * [`moyal_rhs`] evaluates the star-bracket form `-i [H, W]` through the
//!   operator route and is the authoritative rhs for any confined field.
//! * [`liouville_split`] expands the same derivative into the classical
//!   drift-force term plus one quantum correction per odd derivative order
//!   `lambda >= 3` of the potential. For a polynomial potential of degree at
//!   most `lambda_max` the expansion terminates and the parts sum back to the
//!   bracket; for other potentials the series is asymptotic and only the
//!   bracket route is authoritative.
//! * [`wigner_rhs_krylov`] writes the derivative in a spreading chain's own
//!   field set, pairing each cross field with the amplitude combinations of
//!   [`MnmMatrix`].
//!
//! [`complexity_rate_split`] integrates the split against a spreading kernel,
//! giving the classical and per-order quantum contributions to the growth
//! rate of the phase-space complexity average.

use ndarray::Array2;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use gridcore::spectral::{centered_dft_minus, centered_idft_minus};
use gridcore::{Grid1D, C64};
use krylov::ChainAmplitudes;
use moyal::moyal_bracket;
use wigner::{KrylovPhaseSet, Normalization, PhaseField};

/// Largest derivative order accepted by [`liouville_split`]. Spectral
/// `p`-derivatives beyond this amplify band-edge content faster than the
/// confined fields decay.
pub const LAMBDA_CAP: usize = 9;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("field scaling does not match this operation")]
    NormalizationMismatch,
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("lambda_max must be odd and positive, got {0}")]
    BadLambdaMax(usize),
    #[error("lambda_max {requested} exceeds the derivative cap {cap}")]
    LambdaCapExceeded { requested: usize, cap: usize },
    #[error("chain data lengths disagree")]
    DimensionMismatch,
    #[error(transparent)]
    Star(#[from] moyal::MoyalError),
    #[error(transparent)]
    Field(#[from] wigner::WignerError),
}

/// Confining potential with every derivative order available on the grid.
#[derive(Debug, Clone)]
pub enum Potential {
    /// Coefficients ordered low to high: `V(q) = sum_k c[k] q^k`.
    /// Derivatives are exact.
    Polynomial(Vec<f64>),
    /// Values sampled on the grid's `q` points. Derivatives are spectral, so
    /// the samples must continue across the box edges without a jump.
    Sampled(Vec<f64>),
}

impl Potential {
    /// `order`-th derivative evaluated on the grid's `q` points; order 0 is
    /// the potential itself.
    pub fn derivative_samples(
        &self,
        grid: &Grid1D,
        order: usize,
    ) -> Result<Vec<f64>, DynamicsError> {
        match self {
            Potential::Polynomial(coeffs) => {
                let d = polynomial_derivative(coeffs, order);
                Ok(grid.q_points().iter().map(|&q| horner(&d, q)).collect())
            }
            Potential::Sampled(values) => {
                if values.len() != grid.n() {
                    return Err(DynamicsError::DimensionMismatch);
                }
                let mut data: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
                spectral_derivative(&mut data, grid.delta(), order);
                Ok(data.into_iter().map(|v| v.re).collect())
            }
        }
    }

    /// Whether the `order`-th derivative is identically zero.
    fn vanishes_at(&self, order: usize) -> bool {
        match self {
            Potential::Polynomial(coeffs) => order >= coeffs.len(),
            Potential::Sampled(_) => false,
        }
    }
}

fn polynomial_derivative(coeffs: &[f64], order: usize) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    for _ in 0..order {
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &v)| k as f64 * v)
            .collect();
    }
    c
}

fn horner(coeffs: &[f64], q: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * q + c)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// In-place spectral derivative of samples with uniform `spacing`. The
/// unpaired band-edge bin has no conjugate partner, so odd orders drop it to
/// keep real data real.
fn spectral_derivative(data: &mut [C64], spacing: f64, order: usize) {
    let n = data.len();
    centered_dft_minus(data);
    for (idx, v) in data.iter_mut().enumerate() {
        let j = idx as f64 - n as f64 / 2.0;
        let k = 2.0 * std::f64::consts::PI * j / (n as f64 * spacing);
        if idx == 0 && order % 2 == 1 {
            *v = C64::new(0.0, 0.0);
        } else {
            *v *= C64::new(0.0, k).powu(order as u32);
        }
    }
    centered_idft_minus(data);
}

/// `order`-th derivative of the field along the `q` axis, column by column.
fn derivative_along_q(field: &PhaseField, order: usize) -> Array2<C64> {
    let n = field.grid().n();
    let dq = field.grid().base().delta();
    let values = field.values();
    let cols: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut col: Vec<C64> = (0..n).map(|i| values[[i, k]]).collect();
            spectral_derivative(&mut col, dq, order);
            col
        })
        .collect();
    let mut out = Array2::zeros((n, n));
    for (k, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            out[[i, k]] = v;
        }
    }
    out
}

/// `order`-th derivative of the field along the `p` axis, row by row.
fn derivative_along_p(field: &PhaseField, order: usize) -> Array2<C64> {
    let n = field.grid().n();
    let dp = field.grid().dp();
    let values = field.values();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<C64> = (0..n).map(|k| values[[i, k]]).collect();
            spectral_derivative(&mut row, dp, order);
            row
        })
        .collect();
    let mut out = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            out[[i, k]] = v;
        }
    }
    out
}

/// Star-bracket form of the evolution: `dW/dt = -i [H, W]` with the bracket
/// taken through the operator route. `w` must carry distribution scaling and
/// `h_field` symbol scaling; the result keeps the distribution scaling.
pub fn moyal_rhs(w: &PhaseField, h_field: &PhaseField) -> Result<PhaseField, DynamicsError> {
    if w.normalization() != Normalization::Wigner
        || h_field.normalization() != Normalization::Symbol
    {
        return Err(DynamicsError::NormalizationMismatch);
    }
    if w.grid() != h_field.grid() {
        return Err(DynamicsError::GridMismatch);
    }
    let w_symbol = PhaseField::new(
        w.grid().clone(),
        w.values().clone(),
        Normalization::Symbol,
    )?;
    let bracket = moyal_bracket(h_field, &w_symbol)?;
    let values = bracket.values().mapv(|v| v * C64::new(0.0, -1.0));
    Ok(PhaseField::new(
        w.grid().clone(),
        values,
        Normalization::Wigner,
    )?)
}

/// Evolution split into the classical drift-force term and one quantum
/// correction per odd potential-derivative order.
#[derive(Debug, Clone)]
pub struct LiouvilleSplit {
    /// `-(p/m) dW/dq + V'(q) dW/dp`.
    pub classical: PhaseField,
    /// Odd order `lambda >= 3` mapped to
    /// `(1/lambda!) (1/2i)^(lambda-1) V^(lambda)(q) d^lambda W/dp^lambda`.
    /// Orders whose potential derivative vanishes identically are omitted.
    pub quantum_terms: BTreeMap<usize, PhaseField>,
    pub lambda_max: usize,
}

/// Expands `dW/dt` in potential-derivative orders up to `lambda_max`. All
/// field derivatives are spectral, which the confinement of `w` (enforced at
/// its construction) makes accurate. For non-polynomial potentials the series
/// is asymptotic; [`moyal_rhs`] stays the authoritative derivative there.
pub fn liouville_split(
    w: &PhaseField,
    potential: &Potential,
    lambda_max: usize,
) -> Result<LiouvilleSplit, DynamicsError> {
    if w.normalization() != Normalization::Wigner {
        return Err(DynamicsError::NormalizationMismatch);
    }
    if lambda_max % 2 == 0 || lambda_max == 0 {
        return Err(DynamicsError::BadLambdaMax(lambda_max));
    }
    if lambda_max > LAMBDA_CAP {
        return Err(DynamicsError::LambdaCapExceeded {
            requested: lambda_max,
            cap: LAMBDA_CAP,
        });
    }
    let grid = w.grid();
    let base = grid.base();
    let n = grid.n();
    let mass = base.mass();

    let force = potential.derivative_samples(base, 1)?;
    let dw_dq = derivative_along_q(w, 1);
    let dw_dp = derivative_along_p(w, 1);
    let mut classical = Array2::zeros((n, n));
    for i in 0..n {
        for k in 0..n {
            let p = grid.p(k);
            classical[[i, k]] = dw_dq[[i, k]] * (-p / mass) + dw_dp[[i, k]] * force[i];
        }
    }
    let classical = PhaseField::new(grid.clone(), classical, Normalization::Wigner)?;

    let mut quantum_terms = BTreeMap::new();
    let mut lambda = 3;
    while lambda <= lambda_max {
        if !potential.vanishes_at(lambda) {
            let v_lambda = potential.derivative_samples(base, lambda)?;
            let dw = derivative_along_p(w, lambda);
            // (1/2i)^(lambda-1) is real for odd lambda.
            let sign = if ((lambda - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let prefactor = sign / (factorial(lambda) * 2f64.powi(lambda as i32 - 1));
            let mut term = Array2::zeros((n, n));
            for i in 0..n {
                for k in 0..n {
                    term[[i, k]] = dw[[i, k]] * (prefactor * v_lambda[i]);
                }
            }
            quantum_terms.insert(
                lambda,
                PhaseField::new(grid.clone(), term, Normalization::Wigner)?,
            );
        }
        lambda += 2;
    }
    Ok(LiouvilleSplit {
        classical,
        quantum_terms,
        lambda_max,
    })
}

/// Classical and per-order quantum contributions to the growth rate of the
/// kernel average: each part of the split integrated against `k_field`.
pub fn complexity_rate_split(
    k_field: &PhaseField,
    split: &LiouvilleSplit,
) -> Result<(f64, BTreeMap<usize, f64>), DynamicsError> {
    if k_field.grid() != split.classical.grid() {
        return Err(DynamicsError::GridMismatch);
    }
    let rate_classical = k_field.integrate_product(&split.classical).re;
    let rate_quantum = split
        .quantum_terms
        .iter()
        .map(|(&lambda, term)| (lambda, k_field.integrate_product(term).re))
        .collect();
    Ok((rate_classical, rate_quantum))
}

/// Amplitude combinations pairing a chain state with its coupling
/// coefficients: `M[n][m] = phi_n (a_m conj(phi_m) + b_{m+1} conj(phi_{m+1})
/// + b_m conj(phi_{m-1}))`.
#[derive(Debug, Clone)]
pub struct MnmMatrix {
    entries: Array2<C64>,
}

impl MnmMatrix {
    pub fn from_amplitudes(
        phi: &ChainAmplitudes,
        a: &[f64],
        b: &[f64],
    ) -> Result<Self, DynamicsError> {
        let d = phi.phi.len();
        if a.len() != d || b.len() != d {
            return Err(DynamicsError::DimensionMismatch);
        }
        let mut entries = Array2::zeros((d, d));
        for n in 0..d {
            for m in 0..d {
                let mut s = phi.phi[m].conj() * a[m];
                if m + 1 < d {
                    s += phi.phi[m + 1].conj() * b[m + 1];
                }
                if m > 0 {
                    s += phi.phi[m - 1].conj() * b[m];
                }
                entries[[n, m]] = phi.phi[n] * s;
            }
        }
        Ok(MnmMatrix { entries })
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn entry(&self, n: usize, m: usize) -> C64 {
        self.entries[[n, m]]
    }
}

/// Chain-side form of the evolution: `dW/dt = i sum_nm W[n][m] (M[n][m] -
/// conj(M[m][n]))` over the set's cross fields. Exact whenever the state
/// stays inside the chain's span.
pub fn wigner_rhs_krylov(
    set: &KrylovPhaseSet,
    phi: &ChainAmplitudes,
    a: &[f64],
    b: &[f64],
) -> Result<PhaseField, DynamicsError> {
    let d = set.dim();
    if phi.phi.len() != d || a.len() != d || b.len() != d {
        return Err(DynamicsError::DimensionMismatch);
    }
    let m_matrix = MnmMatrix::from_amplitudes(phi, a, b)?;
    let n = set.grid().n();
    let mut values: Array2<C64> = Array2::zeros((n, n));
    for ni in 0..d {
        for mi in 0..d {
            let weight = C64::new(0.0, 1.0)
                * (m_matrix.entry(ni, mi) - m_matrix.entry(mi, ni).conj());
            if weight.norm_sqr() == 0.0 {
                continue;
            }
            values.scaled_add(weight, set.field(ni, mi).values());
        }
    }
    Ok(PhaseField::new(
        set.grid().clone(),
        values,
        Normalization::Wigner,
    )?)
}

/// One growth-rate sample for serialization.
#[derive(Debug, Clone)]
pub struct RateSample {
    pub t: f64,
    pub classical: f64,
    pub quantum: BTreeMap<usize, f64>,
}

/// CSV time series with header `t,rate_classical,rate_lambda{k},...`. The
/// lambda columns are the sorted union of the samples' orders; a sample
/// missing an order writes 0.
pub fn rate_series_csv(samples: &[RateSample]) -> String {
    let mut lambdas: Vec<usize> = samples
        .iter()
        .flat_map(|s| s.quantum.keys().copied())
        .collect();
    lambdas.sort_unstable();
    lambdas.dedup();
    let mut out = String::from("t,rate_classical");
    for lambda in &lambdas {
        let _ = write!(out, ",rate_lambda{lambda}");
    }
    out.push('\n');
    for sample in samples {
        let _ = write!(out, "{},{}", sample.t, sample.classical);
        for lambda in &lambdas {
            let v = sample.quantum.get(lambda).copied().unwrap_or(0.0);
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}
