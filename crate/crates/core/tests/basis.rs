#![allow(clippy::needless_range_loop)]

use std::collections::VecDeque;

use insitu_core::basis::{
    fwht, reshape_2d, sign_changes, BasisKind, BasisMatrix, Ordering, DEFAULT_RANDOM_SEED,
};
use insitu_core::Error;
use proptest::prelude::*;

/// Sylvester matrix by Kronecker doubling, independent of the library's
/// popcount formula.
fn kronecker_hadamard(n: usize) -> Vec<Vec<i32>> {
    let mut h = vec![vec![1]];
    while h.len() < n {
        let k = h.len();
        let mut next = vec![vec![0; 2 * k]; 2 * k];
        for i in 0..k {
            for j in 0..k {
                next[i][j] = h[i][j];
                next[i][j + k] = h[i][j];
                next[i + k][j] = h[i][j];
                next[i + k][j + k] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

fn bfs_plus_regions(row: &[i8], side: usize) -> usize {
    let mut seen = vec![false; row.len()];
    let mut count = 0;
    for s in 0..row.len() {
        if row[s] != 1 || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(p) = q.pop_front() {
            let (r, c) = ((p / side) as isize, (p % side) as isize);
            for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= side as isize || nc >= side as isize {
                    continue;
                }
                let np = nr as usize * side + nc as usize;
                if row[np] == 1 && !seen[np] {
                    seen[np] = true;
                    q.push_back(np);
                }
            }
        }
    }
    count
}

fn all_orderings() -> [Ordering; 4] {
    [Ordering::Natural, Ordering::Walsh, Ordering::CakeCutting, Ordering::Random(DEFAULT_RANDOM_SEED)]
}

#[test]
fn orthogonal_in_integer_arithmetic() {
    for n in [4, 16, 64, 256] {
        for ordering in all_orderings() {
            let h = BasisMatrix::hadamard(n, ordering).unwrap();
            let d = h.dense();
            for i in 0..n {
                for j in 0..n {
                    let dot: i64 = (0..n).map(|k| i64::from(d[i * n + k]) * i64::from(d[j * n + k])).sum();
                    assert_eq!(dot, if i == j { n as i64 } else { 0 }, "n={n} {ordering} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn natural_rows_match_kronecker_construction() {
    for n in [4, 16, 64, 256] {
        let h = BasisMatrix::hadamard(n, Ordering::Natural).unwrap();
        let k = kronecker_hadamard(n);
        for i in 0..n {
            let row: Vec<i32> = h.row(i).iter().map(|&v| i32::from(v)).collect();
            assert_eq!(row, k[i]);
        }
    }
}

#[test]
fn walsh_row_k_has_k_sign_changes() {
    for n in [4, 16, 64, 256, 1024] {
        let w = BasisMatrix::hadamard(n, Ordering::Walsh).unwrap();
        for k in 0..n {
            assert_eq!(sign_changes(&w.row(k)), k);
        }
    }
}

#[test]
fn orderings_permute_the_same_rows() {
    for n in [16, 64, 256] {
        let mut reference: Vec<Vec<i8>> = (0..n)
            .map(|i| BasisMatrix::hadamard(n, Ordering::Natural).unwrap().row(i))
            .collect();
        reference.sort();
        for ordering in all_orderings() {
            let b = BasisMatrix::hadamard(n, ordering).unwrap();
            let mut rows: Vec<Vec<i8>> = (0..n).map(|i| b.row(i)).collect();
            rows.sort();
            assert_eq!(rows, reference, "{ordering}");
        }
    }
}

#[test]
fn cake_cutting_matches_flood_fill() {
    for n in [16, 64, 256] {
        let side = (n as f64).sqrt() as usize;
        let natural = BasisMatrix::hadamard(n, Ordering::Natural).unwrap();
        let mut expected: Vec<usize> = (0..n).collect();
        expected.sort_by_key(|&i| bfs_plus_regions(&natural.row(i), side));
        let cake = BasisMatrix::hadamard(n, Ordering::CakeCutting).unwrap();
        assert_eq!(cake.perm(), expected.as_slice(), "n={n}");
        let counts: Vec<usize> = (0..n).map(|i| bfs_plus_regions(&cake.row(i), side)).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn cake_cutting_fixture_n16() {
    let cake = BasisMatrix::hadamard(16, Ordering::CakeCutting).unwrap();
    assert_eq!(cake.perm(), &[0, 2, 8, 1, 3, 4, 10, 12, 11, 14, 6, 9, 15, 7, 13, 5]);
}

#[test]
fn random_order_fixture() {
    let b = BasisMatrix::hadamard(64, Ordering::Random(DEFAULT_RANDOM_SEED)).unwrap();
    assert_eq!(&b.perm()[..16], &[43, 48, 19, 14, 5, 29, 24, 6, 52, 11, 60, 1, 17, 30, 63, 20]);
    assert_ne!(b.perm(), (0..64).collect::<Vec<_>>().as_slice());
    let again = BasisMatrix::hadamard(64, Ordering::Random(DEFAULT_RANDOM_SEED)).unwrap();
    assert_eq!(again, b);
    assert_ne!(BasisMatrix::hadamard(64, Ordering::Random(1)).unwrap().perm(), b.perm());
}

#[test]
fn row_three_of_h16_is_vertical_stripes() {
    let h = BasisMatrix::hadamard(16, Ordering::Natural).unwrap();
    let g = reshape_2d(&h.row(3)).unwrap();
    for r in 0..4 {
        let row: Vec<i8> = (0..4).map(|c| *g.get(r, c)).collect();
        assert_eq!(row, vec![1, -1, -1, 1]);
    }
}

#[test]
fn canonical_is_identity() {
    let c = BasisMatrix::canonical(16).unwrap();
    let v: Vec<f64> = (0..16).map(|i| f64::from(i) * 0.5 - 3.0).collect();
    assert_eq!(c.apply(&v).unwrap(), v);
    assert_eq!(c.solve(&v).unwrap(), v);
    assert_eq!(c.kind(), BasisKind::Canonical);
}

#[test]
fn walsh_solve_matches_dense_gaussian_elimination() {
    let n = 16;
    let w = BasisMatrix::hadamard(n, Ordering::Walsh).unwrap();
    let y: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 4.5).collect();
    // augmented system [W | y], partial pivoting
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r: Vec<f64> = w.row(i).iter().map(|&v| f64::from(v)).collect();
            r.push(y[i]);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let dense: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
    let fast = w.solve(&y).unwrap();
    for (f, d) in fast.iter().zip(&dense) {
        assert!((f - d).abs() < 1e-10);
    }
}

#[test]
fn fwht_rejects_non_power_of_two() {
    let mut v = vec![1.0; 12];
    assert!(matches!(fwht(&mut v), Err(Error::NotPowerOfTwo(12))));
    assert!(BasisMatrix::hadamard(32, Ordering::Natural).is_err());
    assert!(BasisMatrix::hadamard(64, Ordering::Natural).unwrap().apply(&[0.0; 63]).is_err());
}

#[test]
fn ordering_names_round_trip() {
    for o in all_orderings() {
        assert_eq!(o.to_string().parse::<Ordering>().unwrap(), o);
    }
    assert_eq!("cake".parse::<Ordering>().unwrap(), Ordering::CakeCutting);
    assert_eq!("random:9".parse::<Ordering>().unwrap(), Ordering::Random(9));
    assert!("sequency".parse::<Ordering>().is_err());
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

proptest! {
    #[test]
    fn fwht_equals_dense_multiply(log_n in 0u32..=8, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let mut state = seed;
        let v: Vec<f64> = (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let h = kronecker_hadamard(n);
        let dense: Vec<f64> = h.iter().map(|r| r.iter().zip(&v).map(|(&a, b)| f64::from(a) * b).sum()).collect();
        let mut fast = v.clone();
        fwht(&mut fast).unwrap();
        prop_assert!(rel_err(&fast, &dense) < 1e-12);
        fwht(&mut fast).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| x * n as f64).collect();
        prop_assert!(rel_err(&fast, &scaled) < 1e-12);
    }

    #[test]
    fn solve_inverts_apply(k in 1u32..=5, ord in 0usize..4, v in proptest::collection::vec(-10.0f64..10.0, 1024)) {
        let n = 1usize << (2 * k);
        let ordering = all_orderings()[ord];
        let b = BasisMatrix::hadamard(n, ordering).unwrap();
        let v = &v[..n];
        let back = b.solve(&b.apply(v).unwrap()).unwrap();
        prop_assert!(rel_err(&back, v) < 1e-12);
        // apply equals the dense row-by-row product
        let y = b.apply(v).unwrap();
        for i in (0..n).step_by(n / 4 + 1) {
            let row = b.row(i);
            let direct: f64 = row.iter().zip(v).map(|(&a, x)| f64::from(a) * x).sum();
            prop_assert!((direct - y[i]).abs() < 1e-9 * (1.0 + direct.abs()));
        }
    }
}
