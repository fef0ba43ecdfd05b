//! Lanczos recursions: the state-space Krylov basis generated by H from
//! |psi0>, the operator-space basis generated by the Liouvillian [H, .] from
//! O0, and amplitude evolution on the resulting tridiagonal chain.
//!
//! Both recursions run with full reorthogonalization (two Gram-Schmidt passes
//! per step) and terminate when the next coupling drops below `tol` times a
//! power-iteration estimate of the spectral norm of H, which is treated as
//! exact closure of the Krylov space.

use gridcore::C64;
use nalgebra::{DMatrix, DVector};
use ndarray::Array1;
use quantum::{hs_inner, OperatorMatrix, SpectralDecomposition, StateVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KrylovError {
    #[error("initial state norm deviates from 1 by {0}")]
    NotNormalized(f64),
    #[error("initial operator has zero Hilbert-Schmidt norm")]
    ZeroSeed,
    #[error("initial operator must be Hermitian")]
    NotHermitian,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("coefficient arrays have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("b[0] must be zero, got {0}")]
    BadFirstCoupling(f64),
    #[error("basis vectors deviate from orthonormality by {0}")]
    NotOrthonormal(f64),
    #[error("basis must hold at least one vector")]
    EmptyBasis,
}

/// State-space Krylov basis `|K_n>` with its tridiagonal coefficients.
/// `b[0] = 0`; `b[n]` couples `K_{n-1}` and `K_n`.
#[derive(Debug, Clone)]
pub struct KrylovStateBasis {
    vectors: Vec<StateVector>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl KrylovStateBasis {
    /// Assembles a chain from externally computed vectors and coefficients.
    /// The vectors must be orthonormal in the state inner product to 1e-8,
    /// `a` and `b` must match their count, and `b[0]` must be zero.
    pub fn from_parts(
        vectors: Vec<StateVector>,
        a: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self, KrylovError> {
        if vectors.is_empty() {
            return Err(KrylovError::EmptyBasis);
        }
        if a.len() != vectors.len() {
            return Err(KrylovError::LengthMismatch(a.len(), vectors.len()));
        }
        if b.len() != vectors.len() {
            return Err(KrylovError::LengthMismatch(b.len(), vectors.len()));
        }
        if b[0] != 0.0 {
            return Err(KrylovError::BadFirstCoupling(b[0]));
        }
        let mut dev = 0.0f64;
        for (n, v) in vectors.iter().enumerate() {
            for (m, w) in vectors.iter().enumerate().skip(n) {
                let want = if n == m { 1.0 } else { 0.0 };
                dev = dev.max((v.inner(w) - C64::from(want)).norm());
            }
        }
        if dev > 1e-8 {
            return Err(KrylovError::NotOrthonormal(dev));
        }
        Ok(Self { vectors, a, b })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, n: usize) -> &StateVector {
        &self.vectors[n]
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Operator-space Krylov basis `O_n` under the Liouvillian; the diagonal
/// coefficients vanish for a Hermitian seed, so only `b` is stored.
#[derive(Debug, Clone)]
pub struct KrylovOperatorBasis {
    operators: Vec<OperatorMatrix>,
    b: Vec<f64>,
}

impl KrylovOperatorBasis {
    pub fn dim(&self) -> usize {
        self.operators.len()
    }

    pub fn operator(&self, n: usize) -> &OperatorMatrix {
        &self.operators[n]
    }

    pub fn operators(&self) -> &[OperatorMatrix] {
        &self.operators
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Krylov-chain amplitudes `phi_n(t)`.
#[derive(Debug, Clone)]
pub struct ChainAmplitudes {
    pub phi: Vec<C64>,
    pub t: f64,
}

/// Spectral-norm estimate for a Hermitian matrix: 30 power iterations from a
/// fixed, fully deterministic start vector.
pub fn spectral_norm_estimate(h: &OperatorMatrix) -> f64 {
    let n = h.grid().n();
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.3 * ((i + 1) as f64).sin(), 0.0))
        .collect();
    let mut norm = 0.0;
    for _ in 0..30 {
        let scale = 1.0 / v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
        let mut w = vec![C64::new(0.0, 0.0); n];
        for a in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n {
                acc += h.entries()[(a, b)] * v[b];
            }
            w[a] = acc;
        }
        norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v = w;
    }
    norm
}

/// Lanczos recursion for `H` from `psi0` in the state inner product, with
/// full reorthogonalization. Stops at `k_max` vectors or when the next
/// coupling falls below `tol * ||H||`.
pub fn lanczos_state(
    h: &OperatorMatrix,
    psi0: &StateVector,
    k_max: usize,
    tol: f64,
) -> Result<KrylovStateBasis, KrylovError> {
    if tol <= 0.0 {
        return Err(KrylovError::BadTolerance(tol));
    }
    let norm_dev = (psi0.norm() - 1.0).abs();
    if norm_dev > 1e-8 {
        return Err(KrylovError::NotNormalized(norm_dev));
    }
    let h_norm = spectral_norm_estimate(h);
    let cutoff = tol * h_norm.max(1e-300);

    let mut vectors = vec![psi0.clone()];
    let mut a = Vec::new();
    let mut b = vec![0.0];

    for n in 0..k_max {
        let v_n = &vectors[n];
        let mut w = h.apply(v_n);
        let a_n = v_n.inner(&w).re;
        a.push(a_n);
        if n + 1 == k_max {
            break;
        }
        // Three-term subtraction, then two full reorthogonalization passes.
        axpy_state(&mut w, C64::new(-a_n, 0.0), v_n);
        if n > 0 {
            let bn = b[n];
            let prev = vectors[n - 1].clone();
            axpy_state(&mut w, C64::new(-bn, 0.0), &prev);
        }
        for _ in 0..2 {
            for v in &vectors {
                let overlap = v.inner(&w);
                axpy_state(&mut w, -overlap, v);
            }
        }
        let b_next = w.norm();
        if b_next < cutoff {
            break;
        }
        let scale = 1.0 / b_next;
        let next = StateVector::new(
            v_n.grid().clone(),
            w.amplitudes().mapv(|x| x * scale),
        )
        .expect("grid unchanged");
        b.push(b_next);
        vectors.push(next);
    }
    a.truncate(vectors.len());
    b.truncate(vectors.len());
    Ok(KrylovStateBasis { vectors, a, b })
}

fn axpy_state(w: &mut StateVector, c: C64, v: &StateVector) {
    let updated = w.amplitudes() + &v.amplitudes().mapv(|x| x * c);
    *w = StateVector::new(w.grid().clone(), updated).expect("grid unchanged");
}

/// Relative seed-overlap floor below which [`lanczos_state_spectral`] drops
/// an eigenlevel: levels carrying only rounding-scale overlap would re-enter
/// the recursion amplified by roughly `E_max / b_n` per step.
const SPECTRAL_WEIGHT_FLOOR: f64 = 1e-14;

/// Lanczos recursion for `H` from `psi0`, run in the eigenbasis of `H`
/// instead of on the grid.
///
/// The seed is projected onto the eigenlevels whose overlap exceeds
/// `SPECTRAL_WEIGHT_FLOOR` times the largest one and the projection is
/// renormalized; the three-term recursion then acts on those coefficients
/// with `H` diagonal, so rounding noise stays inside the retained invariant
/// subspace. The grid-space recursion instead leaks rounding noise into the
/// highest modes of the discretized operator and amplifies it by roughly
/// `||H|| / b_n` per step, which floods the late chain vectors once the grid
/// is fine. Termination mirrors [`lanczos_state`]: `k_max` vectors, or a
/// coupling below `tol` times the largest retained `|eigenvalue|`.
pub fn lanczos_state_spectral(
    spectrum: &SpectralDecomposition,
    psi0: &StateVector,
    k_max: usize,
    tol: f64,
) -> Result<KrylovStateBasis, KrylovError> {
    if tol <= 0.0 {
        return Err(KrylovError::BadTolerance(tol));
    }
    if k_max == 0 {
        return Err(KrylovError::EmptyBasis);
    }
    let norm_dev = (psi0.norm() - 1.0).abs();
    if norm_dev > 1e-8 {
        return Err(KrylovError::NotNormalized(norm_dev));
    }
    let grid = spectrum.grid().clone();
    assert_eq!(psi0.grid(), &grid, "seed and spectrum grids differ");
    let n = grid.n();
    let columns = spectrum.eigenvectors();

    // Seed overlaps: columns are plain-orthonormal, wavefunctions carry an
    // extra 1/sqrt(delta), so <E_a|psi> = sqrt(delta) * sum_i conj(V_ia) psi_i.
    let root_delta = grid.delta().sqrt();
    let overlaps: Vec<C64> = (0..n)
        .map(|a| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += columns[(i, a)].conj() * psi0.amplitudes()[i];
            }
            acc * root_delta
        })
        .collect();
    let peak = overlaps.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let kept: Vec<usize> = (0..n)
        .filter(|&a| overlaps[a].norm() >= SPECTRAL_WEIGHT_FLOOR * peak)
        .collect();
    let energies: Vec<f64> = kept.iter().map(|&a| spectrum.eigenvalues()[a]).collect();
    let e_max = energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let cutoff = tol * e_max.max(1e-300);

    let mut v0: Vec<C64> = kept.iter().map(|&a| overlaps[a]).collect();
    let scale = 1.0 / v0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v0.iter_mut().for_each(|c| *c *= scale);

    let mut coeffs = vec![v0];
    let mut a = Vec::new();
    let mut b = vec![0.0];

    for step in 0..k_max {
        let v_n = coeffs[step].clone();
        let a_n: f64 = v_n
            .iter()
            .zip(&energies)
            .map(|(c, e)| e * c.norm_sqr())
            .sum();
        a.push(a_n);
        if step + 1 == k_max {
            break;
        }
        let mut w: Vec<C64> = v_n
            .iter()
            .zip(&energies)
            .map(|(c, e)| c * (e - a_n))
            .collect();
        if step > 0 {
            let bn = b[step];
            for (wk, pk) in w.iter_mut().zip(&coeffs[step - 1]) {
                *wk -= pk * bn;
            }
        }
        for _ in 0..2 {
            for v in &coeffs {
                let overlap: C64 = v.iter().zip(&w).map(|(vk, wk)| vk.conj() * wk).sum();
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= vk * overlap;
                }
            }
        }
        let b_next = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if b_next < cutoff {
            break;
        }
        let scale = 1.0 / b_next;
        w.iter_mut().for_each(|c| *c *= scale);
        b.push(b_next);
        coeffs.push(w);
    }
    a.truncate(coeffs.len());
    b.truncate(coeffs.len());

    // Synthesize grid vectors from the retained eigenvector columns.
    let vectors: Vec<StateVector> = coeffs
        .iter()
        .map(|cv| {
            let mut amps = Array1::<C64>::zeros(n);
            for (k, &level) in kept.iter().enumerate() {
                let w = cv[k] / root_delta;
                for i in 0..n {
                    amps[i] += columns[(i, level)] * w;
                }
            }
            StateVector::new(grid.clone(), amps).expect("grid matches spectrum")
        })
        .collect();
    KrylovStateBasis::from_parts(vectors, a, b)
}

/// Operator-space Lanczos for the Liouvillian `L O = [H, O]` from a Hermitian
/// seed, in the normalized Hilbert-Schmidt inner product. The diagonal
/// coefficients vanish identically for Hermitian `O0` and `H`; the recursion
/// is `A_n = L O_{n-1} - b_{n-1} O_{n-2}`, `b_n = ||A_n||`, `O_n = A_n / b_n`,
/// with full reorthogonalization.
pub fn lanczos_operator(
    h: &OperatorMatrix,
    o0: &OperatorMatrix,
    k_max: usize,
    tol: f64,
) -> Result<KrylovOperatorBasis, KrylovError> {
    if tol <= 0.0 {
        return Err(KrylovError::BadTolerance(tol));
    }
    if !o0.is_hermitian() {
        return Err(KrylovError::NotHermitian);
    }
    let seed_norm = hs_inner(o0, o0).re.sqrt();
    if seed_norm < 1e-14 {
        return Err(KrylovError::ZeroSeed);
    }
    let h_norm = spectral_norm_estimate(h);
    let cutoff = tol * h_norm.max(1e-300);

    let mut operators = vec![o0.scale(C64::new(1.0 / seed_norm, 0.0))];
    let mut b = vec![0.0];

    for n in 1..k_max {
        let prev = &operators[n - 1];
        let mut w = h.commutator(prev);
        if n >= 2 {
            let coeff = C64::new(-b[n - 1], 0.0);
            w = w.add(&operators[n - 2].scale(coeff));
        }
        for _ in 0..2 {
            for o in &operators {
                let overlap = hs_inner(o, &w);
                w = w.add(&o.scale(-overlap));
            }
        }
        let b_n = hs_inner(&w, &w).re.sqrt();
        if b_n < cutoff {
            break;
        }
        b.push(b_n);
        operators.push(w.scale(C64::new(1.0 / b_n, 0.0)));
    }
    Ok(KrylovOperatorBasis { operators, b })
}

/// `phi_n(t) = <K_n | psi_t>`.
pub fn amplitudes(basis: &KrylovStateBasis, psi_t: &StateVector) -> ChainAmplitudes {
    let phi = basis
        .vectors
        .iter()
        .map(|k| k.inner(psi_t))
        .collect();
    ChainAmplitudes { phi, t: f64::NAN }
}

/// Eigendecomposition of the real symmetric tridiagonal chain matrix,
/// reusable across evaluation times.
pub struct ChainPropagator {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl ChainPropagator {
    /// Build from Lanczos coefficients; `b[0]` must be 0 and lengths equal.
    pub fn new(a: &[f64], b: &[f64]) -> Result<Self, KrylovError> {
        if a.len() != b.len() {
            return Err(KrylovError::LengthMismatch(a.len(), b.len()));
        }
        if !b.is_empty() && b[0] != 0.0 {
            return Err(KrylovError::BadFirstCoupling(b[0]));
        }
        let d = a.len();
        let mut t = DMatrix::zeros(d, d);
        for n in 0..d {
            t[(n, n)] = a[n];
            if n + 1 < d {
                t[(n, n + 1)] = b[n + 1];
                t[(n + 1, n)] = b[n + 1];
            }
        }
        let eig = t.symmetric_eigen();
        Ok(ChainPropagator {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    /// `phi(t) = e^{-i T t} e_0`.
    pub fn evolve(&self, t: f64) -> ChainAmplitudes {
        let d = self.eigenvalues.len();
        let mut phi = vec![C64::new(0.0, 0.0); d];
        for k in 0..d {
            let phase = C64::from_polar(1.0, -self.eigenvalues[k] * t);
            let weight = phase * self.eigenvectors[(0, k)];
            for n in 0..d {
                phi[n] += self.eigenvectors[(n, k)] * weight;
            }
        }
        ChainAmplitudes { phi, t }
    }

    /// First time derivative of the amplitudes,
    /// `d phi / dt = -i T phi(t)`.
    pub fn evolve_derivative(&self, t: f64) -> Vec<C64> {
        let d = self.eigenvalues.len();
        let mut dphi = vec![C64::new(0.0, 0.0); d];
        for k in 0..d {
            let phase = C64::from_polar(1.0, -self.eigenvalues[k] * t)
                * C64::new(0.0, -self.eigenvalues[k]);
            let weight = phase * self.eigenvectors[(0, k)];
            for n in 0..d {
                dphi[n] += self.eigenvectors[(n, k)] * weight;
            }
        }
        dphi
    }
}

/// Solve the chain equation `i d phi_n / dt = a_n phi_n + b_{n+1} phi_{n+1}
/// + b_n phi_{n-1}` from `phi_n(0) = delta_{n0}`.
pub fn chain_evolve(a: &[f64], b: &[f64], t: f64) -> Result<ChainAmplitudes, KrylovError> {
    Ok(ChainPropagator::new(a, b)?.evolve(t))
}

/// Values `P_n(e)` of the Krylov orthogonal polynomials, by the scalar
/// three-term recursion `b_{n+1} P_{n+1} = (e - a_n) P_n - b_n P_{n-1}`,
/// `P_0 = 1`. Returns one value per chain site.
pub fn polynomial_values(a: &[f64], b: &[f64], e: f64) -> Vec<f64> {
    let d = a.len();
    let mut out = Vec::with_capacity(d);
    if d == 0 {
        return out;
    }
    out.push(1.0);
    if d == 1 {
        return out;
    }
    out.push((e - a[0]) / b[1]);
    for n in 1..d - 1 {
        let next = ((e - a[n]) * out[n] - b[n] * out[n - 1]) / b[n + 1];
        out.push(next);
    }
    out
}

/// Tridiagonal chain matrix as a dense column-major array, for tests and for
/// observables that need matrix powers.
pub fn chain_matrix(a: &[f64], b: &[f64]) -> DMatrix<f64> {
    let d = a.len();
    let mut t = DMatrix::zeros(d, d);
    for n in 0..d {
        t[(n, n)] = a[n];
        if n + 1 < d {
            t[(n, n + 1)] = b[n + 1];
            t[(n + 1, n)] = b[n + 1];
        }
    }
    t
}

/// Convenience: `(T^k)_{00}` moments of the chain matrix.
pub fn chain_moments(a: &[f64], b: &[f64], k_max: usize) -> Vec<f64> {
    let t = chain_matrix(a, b);
    let d = a.len();
    let mut v = DVector::zeros(d);
    v[0] = 1.0;
    let mut out = vec![1.0];
    let mut cur = v.clone();
    for _ in 1..=k_max {
        cur = &t * cur;
        out.push(cur[0]);
    }
    out
}
