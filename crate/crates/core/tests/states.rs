use bbq_core::hamiltonian::{Boundary, ChainTerms};
use bbq_core::spectra::{dense_eigh, ground_space};
use bbq_core::states::{
    ground_state_density, partial_trace, partial_transpose, thermal_ensemble, thermal_state, Bipartition,
    DensityMatrix, StateEnsemble,
};
use bbq_core::CMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_density(dims: &[usize], rng: &mut ChaCha8Rng) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(dims.to_vec(), m / tr, "random").unwrap()
}

/// Unoptimized partial trace: sum over every pair of full indices whose
/// traced digits agree.
fn naive_partial_trace(rho: &DensityMatrix, keep: &[usize]) -> CMatrix {
    let dims = &rho.dims;
    let n: usize = dims.iter().product();
    let digits = |mut i: usize| {
        let mut d = vec![0; dims.len()];
        for s in (0..dims.len()).rev() {
            d[s] = i % dims[s];
            i /= dims[s];
        }
        d
    };
    let kept_index = |d: &[usize]| keep.iter().fold(0, |acc, &s| acc * dims[s] + d[s]);
    let m: usize = keep.iter().map(|&s| dims[s]).product();
    let mut out = CMatrix::zeros(m, m);
    for r in 0..n {
        let dr = digits(r);
        for c in 0..n {
            let dc = digits(c);
            let traced_equal = (0..dims.len()).filter(|s| !keep.contains(s)).all(|s| dr[s] == dc[s]);
            if traced_equal {
                out[(kept_index(&dr), kept_index(&dc))] += rho.matrix[(r, c)];
            }
        }
    }
    out
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn partial_trace_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dims in [vec![3, 3, 3], vec![2, 3, 2], vec![3, 2, 3, 2]] {
        let rho = random_density(&dims, &mut rng);
        let sites = dims.len();
        for mask in 1..(1u32 << sites) - 1 {
            let keep: Vec<usize> = (0..sites).filter(|s| mask & (1 << s) != 0).collect();
            let got = partial_trace(&rho, &keep).unwrap();
            let want = naive_partial_trace(&rho, &keep);
            assert!(max_diff(&got.matrix, &want) < 1e-12, "{dims:?} keep {keep:?}");
            assert!((got.trace() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn nested_partial_traces_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = random_density(&[3, 3, 3, 3], &mut rng);
    let direct = partial_trace(&rho, &[1]).unwrap();
    let staged = partial_trace(&partial_trace(&rho, &[0, 1, 2]).unwrap(), &[1]).unwrap();
    assert!(max_diff(&direct.matrix, &staged.matrix) < 1e-12);
}

#[test]
fn partial_transpose_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = random_density(&[3, 3, 3], &mut rng);
    for bp in [Bipartition::split_at(1, 3).unwrap(), Bipartition::split_at(2, 3).unwrap()] {
        let pt = partial_transpose(&rho, &bp).unwrap();
        assert!((pt.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(max_diff(&pt, &pt.adjoint()) < 1e-12);
        let back = DensityMatrix { matrix: pt, ..rho.clone() };
        let twice = partial_transpose(&back, &bp).unwrap();
        assert!(max_diff(&twice, &rho.matrix) < 1e-15);
    }
}

#[test]
fn ensemble_reduction_matches_dense() {
    let h = ChainTerms::new(5, Boundary::Periodic).unwrap().operator(0.4);
    let spectrum = dense_eigh(&h).unwrap();
    let ens: StateEnsemble = thermal_ensemble(&spectrum, 0.7).unwrap();
    let rho = ens.to_density().unwrap();
    for keep in [vec![0], vec![0, 1], vec![1, 3], vec![0, 2, 4]] {
        let a = ens.reduce(&keep).unwrap();
        let b = partial_trace(&rho, &keep).unwrap();
        assert!(max_diff(&a.matrix, &b.matrix) < 1e-12, "keep {keep:?}");
    }
}

#[test]
fn thermal_state_is_valid_and_cools_to_ground() {
    let h = ChainTerms::new(4, Boundary::Periodic).unwrap().operator(-0.3);
    let spectrum = dense_eigh(&h).unwrap();
    for t in [0.05, 0.5, 5.0] {
        let rho = thermal_state(&spectrum, t).unwrap();
        rho.validate().unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }
    let cold = thermal_state(&spectrum, 1e-4).unwrap();
    let ground = ground_state_density(&ground_space(&spectrum, 1e-9).unwrap()).unwrap();
    assert!(max_diff(&cold.matrix, &ground.matrix) < 1e-10);
    let hot = thermal_state(&spectrum, 1e8).unwrap();
    let mixed = CMatrix::identity(81, 81) / Complex64::new(81.0, 0.0);
    assert!(max_diff(&hot.matrix, &mixed) < 1e-8);
}

#[test]
fn energy_expectation_matches_ground_energy() {
    let h = ChainTerms::new(4, Boundary::Open).unwrap().operator(0.2);
    let spectrum = dense_eigh(&h).unwrap();
    let gs = ground_space(&spectrum, 1e-9).unwrap();
    let rho = ground_state_density(&gs).unwrap();
    let hd: DMatrix<f64> = h.to_dense();
    let e: f64 = (rho.matrix.map(|z| z.re) * hd).trace();
    assert!((e - gs.energy).abs() < 1e-10);
}
