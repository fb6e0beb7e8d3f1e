use insitu_core::basis::{BasisMatrix, Ordering};
use insitu_core::interferometry::{measure, reconstruct_full};
use insitu_core::optics::{BenchConfig, BenchState, Exposure, Perturbation};
use insitu_core::solver::{
    adjoint_mismatch, basis_pursuit, cs_reconstruct, dct_forward, dct_inverse, measurement_count, project_l1_ball,
    DenseMatrix, LinearOperator, SensingOperator, SolverOptions, SolverStatus, Sparsifier,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn planted(m: usize, n: usize, k: usize, seed: u64) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
    let a = DenseMatrix::gaussian(m, n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let mut s = vec![0.0; n];
    let mut placed = 0;
    while placed < k {
        let i = rng.random_range(0..n);
        if s[i] == 0.0 {
            s[i] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            placed += 1;
        }
    }
    let b = a.apply(&s);
    (a, s, b)
}

fn tight() -> SolverOptions {
    SolverOptions {
        opt_tol: 1e-10,
        pareto_tol: 1e-10,
        ..SolverOptions::default()
    }
}

#[test]
fn recovers_planted_spikes() {
    for seed in 1..=10 {
        let (a, s0, b) = planted(64, 256, 8, seed);
        let res = basis_pursuit(&a, &b, 0.0, &tight()).unwrap();
        assert!(res.converged, "seed {seed}: {:?}", res.status);
        for (x, y) in res.s.iter().zip(&s0) {
            assert!((x - y).abs() < 1e-4, "seed {seed}: {x} vs {y}, {} iters, {:?} {:?}", res.iterations, res.residual_path, res.tau_path);
            if *y != 0.0 {
                assert_eq!(x.signum(), y.signum());
            }
        }
    }
}

#[test]
fn pareto_residuals_never_increase() {
    for (seed, sigma_frac) in [(4, 0.0), (5, 0.05), (6, 0.3)] {
        let (a, _, mut b) = planted(48, 128, 6, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in &mut b {
            *v += 0.01 * rng.random_range(-1.0..1.0);
        }
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let sigma = sigma_frac * norm;
        let opts = SolverOptions::default();
        let res = basis_pursuit(&a, &b, sigma, &opts).unwrap();
        assert!(res.tau_path.windows(2).all(|w| w[1] >= w[0]), "{:?}", res.tau_path);
        assert!(
            res.residual_path.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)),
            "{:?}",
            res.residual_path
        );
        if res.converged {
            let bound = if sigma > 0.0 { sigma * (1.0 + opts.pareto_tol) } else { opts.pareto_tol * norm };
            assert!(res.residual_norm <= bound * (1.0 + 1e-9), "{} > {bound}", res.residual_norm);
        }
    }
}

#[test]
fn oversized_sigma_is_trivial() {
    let (a, _, b) = planted(16, 32, 2, 7);
    let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let res = basis_pursuit(&a, &b, 1.01 * norm, &SolverOptions::default()).unwrap();
    assert_eq!(res.status, SolverStatus::Trivial);
    assert!(res.s.iter().all(|&v| v == 0.0));
}

#[test]
fn two_by_three_prefers_the_shared_column() {
    // brute force over which columns are active: {2} alone costs 1, any other support ≥ 2
    let a = DenseMatrix::new(2, 3, vec![1.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
    let res = basis_pursuit(&a, &[1.0, 1.0], 0.0, &tight()).unwrap();
    assert!((res.s[0]).abs() < 1e-6 && (res.s[1]).abs() < 1e-6 && (res.s[2] - 1.0).abs() < 1e-6);
}

#[test]
fn sensing_operators_pass_the_dot_product_test() {
    for (n, sparsifier) in [(64, Sparsifier::Dct1d), (256, Sparsifier::Dct2d), (1024, Sparsifier::Dct1d)] {
        for ordering in [Ordering::Natural, Ordering::Walsh, Ordering::CakeCutting] {
            let basis = BasisMatrix::hadamard(n, ordering).unwrap();
            for m in [1, n / 10 + 1, n] {
                let op = SensingOperator::new(&basis, m, sparsifier).unwrap();
                assert_eq!((op.rows(), op.cols()), (m, n));
                assert!(adjoint_mismatch(&op, 20, m as u64) < 1e-8);
            }
        }
    }
    assert!(adjoint_mismatch(&DenseMatrix::gaussian(30, 70, 1), 20, 2) < 1e-8);
}

#[test]
fn dct_columns_are_orthonormal() {
    let n = 32;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            dct_inverse(&e).unwrap()
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    assert!(dct_forward(&[1.0; 12]).is_err());
}

#[test]
fn full_sampling_matches_direct_inversion() {
    let config = BenchConfig {
        side_px: 128,
        camera_window_px: 32,
        ..BenchConfig::default()
    };
    let bench = BenchState::new(&config, Perturbation::glass()).unwrap();
    let basis = BasisMatrix::hadamard(64, Ordering::Walsh).unwrap();
    let igrams = measure(&bench, &basis, Exposure::Fixed(1.0)).unwrap();
    let direct = reconstruct_full(&basis, &igrams).unwrap();
    let cs = cs_reconstruct(&igrams, &basis, 1.0, 0.0, &tight(), Sparsifier::Dct1d).unwrap();
    assert_eq!(cs.m, 64);
    assert!(cs.field.correlation(&direct).unwrap() >= 0.999);
    assert!(cs_reconstruct(&igrams, &BasisMatrix::canonical(64).unwrap(), 1.0, 0.0, &tight(), Sparsifier::Dct1d).is_err());
}

#[test]
fn measurement_counts() {
    assert_eq!(measurement_count(0.05, 4096).unwrap(), 205);
    assert_eq!(measurement_count(1.0, 64).unwrap(), 64);
    assert!(measurement_count(0.02, 16).is_err());
    assert!(measurement_count(0.0, 64).is_err());
    assert!(measurement_count(1.5, 64).is_err());
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn projection_matches_grid_search_in_3d() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        let tau = rng.random_range(0.2..2.0);
        let p = project_l1_ball(&v, tau);
        let steps = 80;
        let h = 2.0 * tau / f64::from(steps);
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                for k in 0..=steps {
                    let g = [-tau + h * f64::from(i), -tau + h * f64::from(j), -tau + h * f64::from(k)];
                    if g.iter().map(|x| x.abs()).sum::<f64>() <= tau + 1e-12 {
                        best = best.min(dist(&v, &g));
                    }
                }
            }
        }
        let d = dist(&v, &p);
        assert!(d <= best + 1e-12 && best - d <= h * 3f64.sqrt(), "{d} vs {best}");
    }
}

proptest! {
    #[test]
    fn projection_is_feasible_idempotent_and_closest(
        v in proptest::collection::vec(-5.0f64..5.0, 1..20),
        tau in 0.01f64..10.0,
        probe in proptest::collection::vec(-1.0f64..1.0, 20),
    ) {
        let p = project_l1_ball(&v, tau);
        let l1: f64 = p.iter().map(|x| x.abs()).sum();
        prop_assert!(l1 <= tau * (1.0 + 1e-12));
        let pp = project_l1_ball(&p, tau);
        prop_assert!(dist(&p, &pp) < 1e-12 * (1.0 + tau));
        if v.iter().map(|x| x.abs()).sum::<f64>() <= tau {
            prop_assert!(dist(&p, &v) == 0.0);
        }
        // any other feasible point is no closer
        let q: Vec<f64> = probe[..v.len()].to_vec();
        let ql1: f64 = q.iter().map(|x| x.abs()).sum();
        let q: Vec<f64> = if ql1 > tau { q.iter().map(|x| x * tau / ql1).collect() } else { q };
        prop_assert!(dist(&v, &p) <= dist(&v, &q) + 1e-12);
    }
}
