//! Hilbert-space layer: Hamiltonians on the position grid, dense spectral
//! decomposition, state and Heisenberg evolution, and the normalized
//! Hilbert-Schmidt inner product.
//!
//! Matrix convention: an `OperatorMatrix` acts directly on amplitude samples,
//! `(O psi)_a = sum_b mat[a,b] psi_b`, so the continuum kernel is
//! `<q_a|O|q_b> = mat[a,b] / delta` and `Tr` of the operator is the plain
//! matrix trace. State inner products carry the quadrature weight:
//! `<phi|psi> = delta * sum conj(phi_i) psi_i`.

use gridcore::spectral::{centered_dft_minus, centered_idft_minus};
use gridcore::{Grid1D, C64};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use thiserror::Error;

pub mod states;

pub use states::{coherent_state, gaussian_state, oscillator_eigenstate};

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("matrix is not Hermitian: max deviation {0}")]
    NotHermitian(f64),
    #[error("potential sample at q={0} is not finite")]
    BadPotential(f64),
    #[error("amplitude array length {got} does not match grid size {want}")]
    BadLength { got: usize, want: usize },
}

/// Wavefunction samples on a position grid.
#[derive(Debug, Clone)]
pub struct StateVector {
    grid: Grid1D,
    amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn new(grid: Grid1D, amplitudes: Array1<C64>) -> Result<Self, QuantumError> {
        if amplitudes.len() != grid.n() {
            return Err(QuantumError::BadLength {
                got: amplitudes.len(),
                want: grid.n(),
            });
        }
        Ok(StateVector { grid, amplitudes })
    }

    /// Build and rescale so that `sum |psi_i|^2 * delta = 1`.
    pub fn normalized(grid: Grid1D, amplitudes: Array1<C64>) -> Result<Self, QuantumError> {
        let mut s = Self::new(grid, amplitudes)?;
        let n = s.norm();
        assert!(n > 0.0, "cannot normalize the zero state");
        s.amplitudes.mapv_inplace(|v| v / n);
        Ok(s)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    /// `sqrt(sum |psi_i|^2 * delta)`.
    pub fn norm(&self) -> f64 {
        (self
            .amplitudes
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            * self.grid.delta())
        .sqrt()
    }

    /// `<self|other> = delta * sum conj(self_i) other_i`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.grid, other.grid, "inner product across grids");
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.delta()
    }
}

/// Dense operator in the position basis, acting on amplitude samples.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    grid: Grid1D,
    entries: Array2<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wrap a matrix; when `hermitian` is set the deviation `max|M - M^dag|`
    /// must not exceed `1e-10 * max|M|`.
    pub fn new(
        grid: Grid1D,
        entries: Array2<C64>,
        hermitian: bool,
    ) -> Result<Self, QuantumError> {
        let n = grid.n();
        if entries.dim() != (n, n) {
            return Err(QuantumError::BadLength {
                got: entries.dim().0,
                want: n,
            });
        }
        if hermitian {
            let dev = hermiticity_deviation(&entries);
            let scale = entries.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if dev > 1e-10 * scale.max(1.0) {
                return Err(QuantumError::NotHermitian(dev));
            }
        }
        Ok(OperatorMatrix {
            grid,
            entries,
            hermitian,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn identity(grid: Grid1D) -> Self {
        let n = grid.n();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        OperatorMatrix {
            grid,
            entries: m,
            hermitian: true,
        }
    }

    /// Position operator: diagonal multiplication by `q_i`.
    pub fn position(grid: Grid1D) -> Self {
        let n = grid.n();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[(i, i)] = C64::new(grid.q(i), 0.0);
        }
        OperatorMatrix {
            grid,
            entries: m,
            hermitian: true,
        }
    }

    /// Momentum operator: circulant built from the full-resolution momentum
    /// multiplier with the unpaired Nyquist mode zeroed (the standard choice
    /// for odd spectral multipliers; keeps Tr[P] = 0 and Tr[QP] = 0 exactly).
    pub fn momentum(grid: Grid1D) -> Self {
        let mut p = grid.full_momentum_points();
        p[0] = 0.0;
        let entries = circulant_from_multiplier(&grid, &p);
        OperatorMatrix {
            grid,
            entries,
            hermitian: true,
        }
    }

    /// Diagonal operator multiplying by `f(q_i)`.
    pub fn from_potential(
        grid: Grid1D,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, QuantumError> {
        let n = grid.n();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            let v = f(grid.q(i));
            if !v.is_finite() {
                return Err(QuantumError::BadPotential(grid.q(i)));
            }
            m[(i, i)] = C64::new(v, 0.0);
        }
        Ok(OperatorMatrix {
            grid,
            entries: m,
            hermitian: true,
        })
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.grid, *psi.grid(), "operator and state grids differ");
        StateVector {
            grid: self.grid.clone(),
            amplitudes: self.entries.dot(psi.amplitudes()),
        }
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.grid, other.grid, "operator grids differ");
        OperatorMatrix {
            grid: self.grid.clone(),
            entries: self.entries.dot(&other.entries),
            hermitian: false,
        }
    }

    pub fn dagger(&self) -> OperatorMatrix {
        let n = self.grid.n();
        let mut m = Array2::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = self.entries[(b, a)].conj();
            }
        }
        OperatorMatrix {
            grid: self.grid.clone(),
            entries: m,
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, c: C64) -> OperatorMatrix {
        OperatorMatrix {
            grid: self.grid.clone(),
            entries: self.entries.mapv(|v| v * c),
            hermitian: self.hermitian && c.im == 0.0,
        }
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.grid, other.grid, "operator grids differ");
        OperatorMatrix {
            grid: self.grid.clone(),
            entries: &self.entries + &other.entries,
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn sub(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.grid, other.grid, "operator grids differ");
        OperatorMatrix {
            grid: self.grid.clone(),
            entries: &self.entries - &other.entries,
            hermitian: self.hermitian && other.hermitian,
        }
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn trace(&self) -> C64 {
        (0..self.grid.n()).map(|i| self.entries[(i, i)]).sum()
    }

    /// Outer product `|psi><phi|` scaled so that its trace against another
    /// operator reproduces matrix elements: entries `delta * psi_a conj(phi_b)`.
    pub fn dyad(psi: &StateVector, phi: &StateVector) -> OperatorMatrix {
        assert_eq!(psi.grid(), phi.grid(), "dyad across grids");
        let n = psi.grid().n();
        let d = psi.grid().delta();
        let mut m = Array2::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = psi.amplitudes()[a] * phi.amplitudes()[b].conj() * d;
            }
        }
        OperatorMatrix {
            grid: psi.grid().clone(),
            entries: m,
            hermitian: false,
        }
    }

    /// Mark a matrix Hermitian after verifying it, without rebuilding.
    pub fn assert_hermitian(mut self) -> Result<Self, QuantumError> {
        let dev = hermiticity_deviation(&self.entries);
        let scale = self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if dev > 1e-10 * scale.max(1.0) {
            return Err(QuantumError::NotHermitian(dev));
        }
        self.hermitian = true;
        Ok(self)
    }
}

fn hermiticity_deviation(m: &Array2<C64>) -> f64 {
    let n = m.dim().0;
    let mut dev = 0.0f64;
    for a in 0..n {
        for b in a..n {
            dev = dev.max((m[(a, b)] - m[(b, a)].conj()).norm());
        }
    }
    dev
}

/// Circulant whose action is Fourier multiplication by `f(p_k)` over the
/// full-resolution momentum set.
fn circulant_from_multiplier(grid: &Grid1D, multiplier: &[f64]) -> Array2<C64> {
    let n = grid.n();
    assert_eq!(multiplier.len(), n);
    // First column of the circulant: inverse centered DFT of the multiplier.
    let mut col: Vec<C64> = multiplier.iter().map(|&v| C64::new(v, 0.0)).collect();
    centered_idft_minus(&mut col);
    // col[(a - b) signed] fills entry (a, b); signed index s maps to slot s + N/2.
    let mut m = Array2::zeros((n, n));
    let ni = n as isize;
    for a in 0..n as isize {
        for b in 0..n as isize {
            let mut s = a - b;
            // Wrap the signed difference into -N/2 .. N/2-1.
            if s >= ni / 2 {
                s -= ni;
            }
            if s < -ni / 2 {
                s += ni;
            }
            m[(a as usize, b as usize)] = col[(s + ni / 2) as usize];
        }
    }
    m
}

/// `H = P^2/2m + V(Q)`: kinetic term spectral over the full momentum set,
/// potential diagonal.
pub fn build_hamiltonian(
    grid: &Grid1D,
    potential: impl Fn(f64) -> f64,
) -> Result<OperatorMatrix, QuantumError> {
    let kin_mult: Vec<f64> = grid
        .full_momentum_points()
        .iter()
        .map(|&p| p * p / (2.0 * grid.mass()))
        .collect();
    let mut entries = circulant_from_multiplier(grid, &kin_mult);
    for i in 0..grid.n() {
        let v = potential(grid.q(i));
        if !v.is_finite() {
            return Err(QuantumError::BadPotential(grid.q(i)));
        }
        entries[(i, i)] += v;
    }
    OperatorMatrix::new(grid.clone(), entries, true)
}

/// Eigenvalues ascending, eigenvectors as plain-orthonormal columns
/// (orthonormal under `sum conj(v) w`, not the delta-weighted inner product;
/// as wavefunctions the columns are `v / sqrt(delta)`).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    grid: Grid1D,
    eigenvalues: Vec<f64>,
    eigenvectors: Array2<C64>,
}

impl SpectralDecomposition {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<C64> {
        &self.eigenvectors
    }

    /// Eigenvector column `a` as a normalized state.
    pub fn eigenstate(&self, a: usize) -> StateVector {
        let scale = 1.0 / self.grid.delta().sqrt();
        StateVector {
            grid: self.grid.clone(),
            amplitudes: self.eigenvectors.column(a).mapv(|v| v * scale),
        }
    }

    /// Compress an operator to the span of the lowest `d` eigenvectors:
    /// `Pi O Pi` with `Pi = sum_{a<d} v_a v_a^dag`. Because H commutes with
    /// Pi, commutators with H act within the sector exactly, so truncated
    /// operators generate closed Liouvillian dynamics at truncated-spectrum
    /// accuracy.
    pub fn truncate_operator(&self, o: &OperatorMatrix, d: usize) -> OperatorMatrix {
        assert_eq!(self.grid, o.grid, "spectrum and operator grids differ");
        assert!(d <= self.grid.n());
        let n = self.grid.n();
        // Pi O Pi = V_d (V_d^dag O V_d) V_d^dag with V_d the first d columns.
        let mut core = Array2::zeros((d, d));
        for a in 0..d {
            for b in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += self.eigenvectors[(i, a)].conj()
                            * o.entries[(i, j)]
                            * self.eigenvectors[(j, b)];
                    }
                }
                core[(a, b)] = acc;
            }
        }
        let mut entries = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..d {
                    for b in 0..d {
                        acc += self.eigenvectors[(i, a)]
                            * core[(a, b)]
                            * self.eigenvectors[(j, b)].conj();
                    }
                }
                entries[(i, j)] = acc;
            }
        }
        OperatorMatrix {
            grid: self.grid.clone(),
            entries,
            hermitian: o.hermitian,
        }
    }

    /// Plain-dot projections `V^dag psi` of a state onto all eigenvectors.
    pub fn project(&self, psi: &StateVector) -> Array1<C64> {
        assert_eq!(self.grid, *psi.grid(), "projection across grids");
        let n = self.grid.n();
        let mut out = Array1::zeros(n);
        for a in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += self.eigenvectors[(i, a)].conj() * psi.amplitudes()[i];
            }
            out[a] = acc;
        }
        out
    }
}

/// Dense Hermitian eigensolve; requires the input to be flagged Hermitian.
pub fn eigendecompose(h: &OperatorMatrix) -> Result<SpectralDecomposition, QuantumError> {
    if !h.hermitian {
        return Err(QuantumError::NotHermitian(f64::INFINITY));
    }
    let n = h.grid.n();
    let m = DMatrix::from_fn(n, n, |a, b| h.entries[(a, b)]);
    let eig = m.symmetric_eigen();
    // Sort ascending by eigenvalue.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (slot, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, slot)] = eig.eigenvectors[(i, src)];
        }
    }
    Ok(SpectralDecomposition {
        grid: h.grid.clone(),
        eigenvalues,
        eigenvectors,
    })
}

/// `psi(t) = sum_a e^{-i E_a t} <E_a|psi0> |E_a>`.
pub fn evolve_state(
    spec: &SpectralDecomposition,
    psi0: &StateVector,
    t: f64,
) -> StateVector {
    let coeffs = spec.project(psi0);
    let n = spec.grid.n();
    let mut amplitudes = Array1::zeros(n);
    for a in 0..n {
        let phase = C64::from_polar(1.0, -spec.eigenvalues[a] * t);
        let c = coeffs[a] * phase;
        for i in 0..n {
            amplitudes[i] += spec.eigenvectors[(i, a)] * c;
        }
    }
    StateVector {
        grid: spec.grid.clone(),
        amplitudes,
    }
}

/// Heisenberg evolution `O(t) = e^{iHt} O e^{-iHt}`.
pub fn evolve_operator(
    spec: &SpectralDecomposition,
    o0: &OperatorMatrix,
    t: f64,
) -> OperatorMatrix {
    assert_eq!(spec.grid, o0.grid, "spectrum and operator grids differ");
    let n = spec.grid.n();
    // V^dag O V, phase-twisted, then back: O(t) = V e^{+iEt} (V^dag O V) e^{-iEt} V^dag.
    let v = &spec.eigenvectors;
    let vdag = {
        let mut m = Array2::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = v[(b, a)].conj();
            }
        }
        m
    };
    let mut core = vdag.dot(&o0.entries).dot(v);
    for a in 0..n {
        for b in 0..n {
            let phase = C64::from_polar(1.0, (spec.eigenvalues[a] - spec.eigenvalues[b]) * t);
            core[(a, b)] *= phase;
        }
    }
    let entries = v.dot(&core).dot(&vdag);
    OperatorMatrix {
        grid: spec.grid.clone(),
        entries,
        hermitian: o0.hermitian,
    }
}

/// Normalized Hilbert-Schmidt inner product `Tr[A^dag B] / D`, `D = N`.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> C64 {
    assert_eq!(a.grid, b.grid, "operands live on different grids");
    let d = a.grid.n() as f64;
    a.entries
        .iter()
        .zip(b.entries.iter())
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        / d
}

/// Momentum-space samples of a state over the full-resolution momentum set,
/// `psi~(p_k) = (delta / sqrt(2 pi)) sum_j psi_j e^{-i p_k q_j}`, normalized so
/// that `sum |psi~|^2 * (2 pi / L) = 1` for a normalized input.
pub fn momentum_representation(psi: &StateVector) -> Array1<C64> {
    let g = psi.grid();
    let mut data: Vec<C64> = psi.amplitudes().to_vec();
    centered_dft_minus(&mut data);
    let scale = g.delta() / (2.0 * std::f64::consts::PI).sqrt();
    Array1::from_iter(data.into_iter().map(|v| v * scale))
}
