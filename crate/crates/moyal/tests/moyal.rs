//! Star-product contracts: operator-route against integral quadrature,
//! genvalue and chain relations, and the coefficient integrals.

use gridcore::{make_grid, Grid1D, PhaseGrid, C64};
use krylov::{lanczos_state_spectral, KrylovStateBasis};
use moyal::{
    classical_hamiltonian_field, lanczos_coeffs_from_phase, moyal_bracket, star,
    star_genvalue_residual, star_integral_reference, star_lanczos_step, MoyalError,
};
use ndarray::Array2;
use quantum::{
    build_hamiltonian, coherent_state, eigendecompose, gaussian_state, SpectralDecomposition,
};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use std::f64::consts::PI;
use wigner::{
    krylov_phase_set, spreading_kernel, wigner_of_pair, wigner_of_state, KrylovPhaseSet,
    Normalization, PhaseField,
};

fn max_abs(f: &PhaseField) -> f64 {
    f.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn max_dev(x: &PhaseField, y: &PhaseField) -> f64 {
    x.values()
        .iter()
        .zip(y.values().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Same values under the symbol tag, for mixed-scale star relations that are
/// linear in one operand.
fn retag_symbol(f: &PhaseField) -> PhaseField {
    PhaseField::new(f.grid().clone(), f.values().clone(), Normalization::Symbol).unwrap()
}

/// Field holding `g(q, p)` in symbol normalization.
fn field_of(grid: &Grid1D, g: impl Fn(f64, f64) -> C64) -> PhaseField {
    let pg = PhaseGrid::new(grid.clone());
    let n = pg.n();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        for k in 0..n {
            values[[i, k]] = g(grid.q(i), pg.p(k));
        }
    }
    PhaseField::new(pg, values, Normalization::Symbol).unwrap()
}

/// Confined band-limited field: a random complex polynomial of total degree
/// two under a Gaussian envelope sized so both box edges and the momentum
/// window see only ~1e-9 tails.
fn smooth_field(grid: &Grid1D, seed: u64) -> PhaseField {
    let pg = PhaseGrid::new(grid.clone());
    let sq = grid.length() / 15.0;
    let sp = pg.p_points()[0].abs() / 7.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeff = [C64::new(0.0, 0.0); 6];
    for c in coeff.iter_mut() {
        *c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    field_of(grid, |q, p| {
        let uq = q / sq;
        let up = p / sp;
        let poly = coeff[0]
            + coeff[1] * uq
            + coeff[2] * up
            + coeff[3] * uq * uq
            + coeff[4] * uq * up
            + coeff[5] * up * up;
        poly * (-(uq * uq + up * up) / 2.0).exp()
    })
}

struct Chain {
    grid: Grid1D,
    h_field: PhaseField,
    spec: SpectralDecomposition,
    basis: KrylovStateBasis,
    set: KrylovPhaseSet,
    h_max: f64,
}

/// Oscillator chain from a coherent seed, built with the eigenbasis
/// recursion so late chain vectors stay free of amplified grid roundoff.
fn chain(k_max: usize) -> Chain {
    let grid = make_grid(128, 22.0, 1.0).unwrap();
    let h = build_hamiltonian(&grid, |q| 0.5 * q * q).unwrap();
    let spec = eigendecompose(&h).unwrap();
    let seed = coherent_state(&grid, 1.0, C64::new(1.8, 0.9)).unwrap();
    let basis = lanczos_state_spectral(&spec, &seed, k_max, 1e-10).unwrap();
    assert_eq!(basis.dim(), k_max);
    let set = krylov_phase_set(&basis).unwrap();
    let h_field = classical_hamiltonian_field(&grid, |q| 0.5 * q * q);
    let h_max = max_abs(&h_field);
    Chain {
        grid,
        h_field,
        spec,
        basis,
        set,
        h_max,
    }
}

#[test]
fn star_with_identity_symbol_returns_the_operand() {
    let grid = make_grid(64, 18.0, 1.0).unwrap();
    let b = smooth_field(&grid, 7);
    let one = field_of(&grid, |_, _| C64::new(1.0, 0.0));
    let left = star(&one, &b).unwrap();
    let right = star(&b, &one).unwrap();
    let scale = 1.0 + max_abs(&b);
    assert!(max_dev(&left, &b) <= 1e-8 * scale, "dev {}", max_dev(&left, &b));
    assert!(max_dev(&right, &b) <= 1e-8 * scale, "dev {}", max_dev(&right, &b));
    assert_eq!(left.normalization(), Normalization::Symbol);
}

#[test]
fn canonical_bracket_averages_to_the_commutator_constant() {
    let grid = make_grid(64, 18.0, 1.0).unwrap();
    let fq = field_of(&grid, |q, _| C64::new(q, 0.0));
    let fp = field_of(&grid, |_, p| C64::new(p, 0.0));
    let br = moyal_bracket(&fq, &fp).unwrap();
    // The commutator matrix is traceless, so its symbol cannot be the
    // constant i everywhere; the faithful lattice statement is the average
    // against confined band-limited states.
    let states = [
        coherent_state(&grid, 1.0, C64::new(1.0, 0.5)).unwrap(),
        gaussian_state(&grid, -1.3, 0.8, 0.9).unwrap(),
    ];
    for psi in &states {
        let w = wigner_of_state(psi).unwrap();
        let avg = br.integrate_product(&w);
        assert!(
            (avg - C64::new(0.0, 1.0)).norm() <= 1e-8,
            "average {avg} should be i"
        );
    }
    let self_br = moyal_bracket(&fq, &fq).unwrap();
    assert!(max_abs(&self_br) <= 1e-13);
}

#[test]
fn quadratic_brackets_match_poisson_images_on_states() {
    let grid = make_grid(64, 18.0, 1.0).unwrap();
    let fq2 = field_of(&grid, |q, _| C64::new(q * q, 0.0));
    let fp = field_of(&grid, |_, p| C64::new(p, 0.0));
    let fp2 = field_of(&grid, |_, p| C64::new(p * p, 0.0));
    let i = C64::new(0.0, 1.0);
    let poisson_q2_p = field_of(&grid, |q, _| i * 2.0 * q);
    let poisson_q2_p2 = field_of(&grid, |q, p| i * 4.0 * q * p);
    let cases = [
        (moyal_bracket(&fq2, &fp).unwrap(), poisson_q2_p),
        (moyal_bracket(&fq2, &fp2).unwrap(), poisson_q2_p2),
    ];
    let states = [
        coherent_state(&grid, 1.0, C64::new(0.9, -0.7)).unwrap(),
        gaussian_state(&grid, 1.1, -0.6, 0.8).unwrap(),
    ];
    for (br, poisson) in &cases {
        for psi in &states {
            let w = wigner_of_state(psi).unwrap();
            let got = br.integrate_product(&w);
            let want = poisson.integrate_product(&w);
            assert!(
                (got - want).norm() <= 1e-8 * (1.0 + want.norm()),
                "bracket average {got} vs Poisson average {want}"
            );
        }
    }
}

#[test]
fn random_smooth_fields_match_the_integral_quadrature() {
    let grid = make_grid(32, 12.0, 1.0).unwrap();
    let a = smooth_field(&grid, 11);
    let b = smooth_field(&grid, 12);
    let fast = star(&a, &b).unwrap();
    let slow = star_integral_reference(&a, &b).unwrap();
    let scale = 1.0 + max_abs(&fast);
    let dev = max_dev(&fast, &slow);
    assert!(dev <= 1e-4 * scale, "routes disagree by {dev}");
}

#[test]
fn oscillator_eigenpairs_solve_the_star_genvalue_equation() {
    let grid = make_grid(64, 18.0, 1.0).unwrap();
    let h = build_hamiltonian(&grid, |q| 0.5 * q * q).unwrap();
    let spec = eigendecompose(&h).unwrap();
    let hf = classical_hamiltonian_field(&grid, |q| 0.5 * q * q);
    let h_max = max_abs(&hf);
    let e = spec.eigenvalues();

    let w00 = wigner_of_state(&spec.eigenstate(0)).unwrap();
    let r00 = star_genvalue_residual(&hf, &w00, e[0], e[0]);
    assert!(r00 <= 1e-6 * h_max, "diagonal residual {r00}");

    let w02 = wigner_of_pair(&spec.eigenstate(0), &spec.eigenstate(2)).unwrap();
    let r02 = star_genvalue_residual(&hf, &w02, e[0], e[2]);
    assert!(r02 <= 1e-6 * h_max, "off-diagonal residual {r02}");

    // An energy off by one must show up at the scale of the field itself.
    let wrong = star_genvalue_residual(&hf, &w02, e[0] + 1.0, e[2]);
    assert!(wrong >= 0.5 * max_abs(&w02), "residual fails to discriminate");

    let br = moyal_bracket(&hf, &retag_symbol(&w00)).unwrap();
    assert!(max_abs(&br) <= 1e-6, "eigenstate field fails to commute: {}", max_abs(&br));
}

#[test]
fn chain_steps_reproduce_the_next_field() {
    let c = chain(6);
    for n in 0..5 {
        let step = star_lanczos_step(&c.h_field, &c.set, n).unwrap();
        let b_next = c.basis.b()[n + 1];
        let target = set_scaled(c.set.field(n + 1, n), b_next);
        let dev = max_dev(&step, &target);
        assert!(dev <= 1e-6 * c.h_max, "site {n}: {dev}");
    }
}

fn set_scaled(f: &PhaseField, s: f64) -> PhaseField {
    f.scaled(C64::new(s, 0.0))
}

#[test]
fn closed_chains_terminate_the_recursion() {
    let grid = make_grid(128, 22.0, 1.0).unwrap();
    let h = build_hamiltonian(&grid, |q| 0.5 * q * q).unwrap();
    let spec = eigendecompose(&h).unwrap();
    let seed = spec.eigenstate(4);
    let basis = lanczos_state_spectral(&spec, &seed, 8, 1e-10).unwrap();
    assert_eq!(basis.dim(), 1);
    let set = krylov_phase_set(&basis).unwrap();
    let hf = classical_hamiltonian_field(&grid, |q| 0.5 * q * q);
    let step = star_lanczos_step(&hf, &set, 0).unwrap();
    assert!(max_abs(&step) <= 1e-6 * max_abs(&hf), "closed chain leaks {}", max_abs(&step));
    assert!(matches!(
        star_lanczos_step(&hf, &set, 1),
        Err(MoyalError::IndexOutOfRange { n: 1, dim: 1 })
    ));
}

#[test]
fn generalized_chain_relations_hold_off_the_diagonal() {
    let c = chain(6);
    let a = c.basis.a();
    let b = c.basis.b();
    for &(n, m) in &[(2usize, 4usize), (3, 1), (0, 3)] {
        let w_nm = c.set.field(n, m);
        let left = star(&c.h_field, &retag_symbol(w_nm)).unwrap();
        let mut residual = left.values().clone();
        residual.zip_mut_with(w_nm.values(), |v, w| *v -= w * a[n]);
        if n > 0 {
            residual.zip_mut_with(c.set.field(n - 1, m).values(), |v, w| *v -= w * b[n]);
        }
        residual.zip_mut_with(c.set.field(n + 1, m).values(), |v, w| *v -= w * b[n + 1]);
        let dev = residual.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-6 * c.h_max, "left relation ({n},{m}): {dev}");

        let right = star(&retag_symbol(w_nm), &c.h_field).unwrap();
        let mut residual = right.values().clone();
        residual.zip_mut_with(w_nm.values(), |v, w| *v -= w * a[m]);
        if m > 0 {
            residual.zip_mut_with(c.set.field(n, m - 1).values(), |v, w| *v -= w * b[m]);
        }
        residual.zip_mut_with(c.set.field(n, m + 1).values(), |v, w| *v -= w * b[m + 1]);
        let dev = residual.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-6 * c.h_max, "right relation ({n},{m}): {dev}");
    }
}

#[test]
fn phase_space_integrals_recover_the_chain_coefficients() {
    let c = chain(8);
    let (pa, pb) = lanczos_coeffs_from_phase(&c.h_field, &c.set);
    assert_eq!(pa.len(), 8);
    assert_eq!(pb.len(), 7);
    for n in 0..8 {
        let want = c.basis.a()[n];
        assert!(
            (pa[n] - want).abs() <= 1e-6 * (1.0 + want.abs()),
            "a[{n}]: {} vs {want}",
            pa[n]
        );
    }
    for n in 1..8 {
        let want = c.basis.b()[n];
        assert!(
            (pb[n - 1] - want).abs() <= 1e-6 * (1.0 + want.abs()),
            "b[{n}]: {} vs {want}",
            pb[n - 1]
        );
    }

    // Kinetic/potential split through the field marginals.
    let pg = c.set.grid().clone();
    let dq = c.grid.delta();
    let dp = pg.dp();
    for &n in &[0usize, 3, 7] {
        let w = c.set.field(n, n);
        let mq = w.marginal_q();
        let mp = w.marginal_p();
        let potential: f64 = mq
            .iter()
            .enumerate()
            .map(|(i, v)| 0.5 * c.grid.q(i) * c.grid.q(i) * v.re * dq)
            .sum();
        let kinetic: f64 = mp
            .iter()
            .enumerate()
            .map(|(k, v)| pg.p(k) * pg.p(k) / (2.0 * c.grid.mass()) * v.re * dp)
            .sum();
        assert!(
            (kinetic + potential - pa[n]).abs() <= 1e-9 * (1.0 + pa[n].abs()),
            "split form at {n}: {} vs {}",
            kinetic + potential,
            pa[n]
        );
    }
}

#[test]
fn eigenstate_seeds_read_back_their_energy() {
    let grid = make_grid(128, 22.0, 1.0).unwrap();
    let h = build_hamiltonian(&grid, |q| 0.5 * q * q).unwrap();
    let spec = eigendecompose(&h).unwrap();
    let basis = lanczos_state_spectral(&spec, &spec.eigenstate(2), 8, 1e-10).unwrap();
    let set = krylov_phase_set(&basis).unwrap();
    let hf = classical_hamiltonian_field(&grid, |q| 0.5 * q * q);
    let (pa, pb) = lanczos_coeffs_from_phase(&hf, &set);
    assert_eq!(pa.len(), 1);
    assert!(pb.is_empty());
    let e2 = spec.eigenvalues()[2];
    assert!((pa[0] - e2).abs() <= 1e-6 * (1.0 + e2.abs()), "{} vs {e2}", pa[0]);
}

#[test]
fn free_particle_chain_matches_direct_matrix_elements() {
    let grid = make_grid(128, 22.0, 1.0).unwrap();
    let h = build_hamiltonian(&grid, |_| 0.0).unwrap();
    let spec = eigendecompose(&h).unwrap();
    let seed = gaussian_state(&grid, -2.0, 1.5, 0.9).unwrap();
    let basis = lanczos_state_spectral(&spec, &seed, 5, 1e-10).unwrap();
    assert_eq!(basis.dim(), 5);
    let set = krylov_phase_set(&basis).unwrap();
    let hf = classical_hamiltonian_field(&grid, |_| 0.0);
    let (pa, pb) = lanczos_coeffs_from_phase(&hf, &set);
    for n in 0..5 {
        let psi = basis.vector(n);
        let direct = psi.inner(&h.apply(psi)).re;
        assert!(
            (pa[n] - direct).abs() <= 1e-6 * (1.0 + direct.abs()),
            "a[{n}]: {} vs {direct}",
            pa[n]
        );
    }
    for n in 1..5 {
        let want = basis.b()[n];
        assert!(
            (pb[n - 1] - want).abs() <= 1e-6 * (1.0 + want.abs()),
            "b[{n}]: {} vs {want}",
            pb[n - 1]
        );
    }
}

#[test]
fn star_is_associative_and_traces_cyclically() {
    let grid = make_grid(64, 18.0, 1.0).unwrap();
    let a = smooth_field(&grid, 3);
    let b = smooth_field(&grid, 4);
    let c = smooth_field(&grid, 5);
    let ab_c = star(&star(&a, &b).unwrap(), &c).unwrap();
    let a_bc = star(&a, &star(&b, &c).unwrap()).unwrap();
    let dev = max_dev(&ab_c, &a_bc);
    assert!(dev <= 1e-8 * (1.0 + max_abs(&ab_c)), "associativity off by {dev}");

    let i1 = star(&a, &b).unwrap().integrate();
    let i2 = star(&b, &a).unwrap().integrate();
    let i3 = a.integrate_product(&b);
    let scale = 1.0 + i3.norm();
    assert!((i1 - i3).norm() <= 1e-8 * scale, "{i1} vs {i3}");
    assert!((i2 - i3).norm() <= 1e-8 * scale, "{i2} vs {i3}");
}

#[test]
fn projector_algebra_closes_under_star() {
    let c = chain(5);
    let d = c.set.dim();
    let inv_two_pi = 1.0 / (2.0 * PI);
    let mut worst = 0.0f64;
    for n in 0..d {
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let prod = star(c.set.field(n, m), c.set.field(i, j)).unwrap();
                    let dev = if m == i {
                        max_dev(&prod, &set_scaled(c.set.field(n, j), inv_two_pi))
                    } else {
                        max_abs(&prod)
                    };
                    worst = worst.max(dev);
                }
            }
        }
    }
    assert!(worst <= 1e-6, "projector algebra off by {worst}");
}

#[test]
fn spreading_kernel_is_a_left_star_eigenfield() {
    let c = chain(5);
    let kernel = spreading_kernel(&c.set);
    for n in 0..5 {
        for m in 0..5 {
            let w = c.set.field(n, m);
            let prod = star(&kernel, &retag_symbol(w)).unwrap();
            let dev = max_dev(&prod, &set_scaled(w, n as f64));
            assert!(dev <= 1e-6, "level pair ({n},{m}): {dev}");
        }
    }
}

#[test]
fn mismatched_operands_are_rejected() {
    let grid = make_grid(64, 18.0, 1.0).unwrap();
    let a = smooth_field(&grid, 1);
    let psi = coherent_state(&grid, 1.0, C64::new(0.5, 0.2)).unwrap();
    let w = wigner_of_state(&psi).unwrap();
    assert!(matches!(
        star(&a, &w),
        Err(MoyalError::NormalizationMismatch { .. })
    ));
    assert!(matches!(
        moyal_bracket(&w, &a),
        Err(MoyalError::NormalizationMismatch { .. })
    ));
    let other = smooth_field(&make_grid(32, 12.0, 1.0).unwrap(), 1);
    assert!(matches!(star(&a, &other), Err(MoyalError::GridMismatch)));
    assert!(matches!(
        star_integral_reference(&w, &a),
        Err(MoyalError::NormalizationMismatch { .. })
    ));
}
