use alloc::vec::Vec;

#[allow(unused_imports)] // only needed without std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dct::Dct;
use crate::basis::{fwht, BasisKind, BasisMatrix};
use crate::error::{invalid, Error, Result};

/// Real linear map `R^cols -> R^rows` with its transpose.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn adjoint(&self, y: &[f64]) -> Vec<f64>;
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = alloc::vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    /// Entries drawn i.i.d. from `N(0, 1/rows)`.
    pub fn gaussian(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (rows as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
            .collect();
        Self { rows, cols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.cols];
        for (row, &yi) in self.data.chunks(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        out
    }
}

/// Sparsifying transform `Ψ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsifier {
    /// 1-D DCT over the length-`n` vector.
    #[default]
    Dct1d,
    /// Separable DCT over the `√n x √n` reshape.
    Dct2d,
}

#[derive(Debug, Clone)]
enum Psi {
    One(Dct),
    Two { side: usize, dct: Dct },
}

impl Psi {
    fn new(kind: Sparsifier, n: usize) -> Result<Self> {
        Ok(match kind {
            Sparsifier::Dct1d => Psi::One(Dct::new(n)?),
            Sparsifier::Dct2d => {
                let side = 1usize << (n.trailing_zeros() / 2);
                if side * side != n {
                    return Err(Error::NotSquare(n));
                }
                Psi::Two {
                    side,
                    dct: Dct::new(side)?,
                }
            }
        })
    }

    fn separable(side: usize, v: &[f64], f: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
        let mut rows: Vec<f64> = v.chunks(side).flat_map(&f).collect();
        let mut col = alloc::vec![0.0; side];
        for c in 0..side {
            for r in 0..side {
                col[r] = rows[r * side + c];
            }
            for (r, val) in f(&col).into_iter().enumerate() {
                rows[r * side + c] = val;
            }
        }
        rows
    }

    /// `x = Ψ s`
    fn synthesize(&self, s: &[f64]) -> Vec<f64> {
        match self {
            Psi::One(d) => d.inverse(s),
            Psi::Two { side, dct } => Self::separable(*side, s, |v| dct.inverse(v)),
        }
    }

    /// `s = Ψᵀ x`
    fn analyze(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Psi::One(d) => d.forward(x),
            Psi::Two { side, dct } => Self::separable(*side, x, |v| dct.forward(v)),
        }
    }
}

/// `Θ = Φ′Ψ`: the first `m` rows of a Hadamard basis composed with the
/// inverse DCT, applied without forming any matrix.
#[derive(Debug, Clone)]
pub struct SensingOperator {
    n: usize,
    rows: Vec<usize>,
    psi: Psi,
}

impl SensingOperator {
    pub fn new(basis: &BasisMatrix, m: usize, sparsifier: Sparsifier) -> Result<Self> {
        if basis.kind() != BasisKind::Hadamard {
            return Err(Error::NotHadamard);
        }
        if m == 0 || m > basis.n() {
            return Err(invalid(alloc::format!("cannot select {m} of {} rows", basis.n())));
        }
        Ok(Self {
            n: basis.n(),
            rows: basis.perm()[..m].to_vec(),
            psi: Psi::new(sparsifier, basis.n())?,
        })
    }

    /// `x = Ψ s`, mapping solver coefficients back to the field.
    pub fn synthesize(&self, s: &[f64]) -> Vec<f64> {
        self.psi.synthesize(s)
    }
}

impl LinearOperator for SensingOperator {
    fn rows(&self) -> usize {
        self.rows.len()
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply(&self, s: &[f64]) -> Vec<f64> {
        let mut x = self.psi.synthesize(s);
        fwht(&mut x).expect("power-of-two length");
        self.rows.iter().map(|&r| x[r]).collect()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut z = alloc::vec![0.0; self.n];
        for (&r, &v) in self.rows.iter().zip(y) {
            z[r] = v;
        }
        fwht(&mut z).expect("power-of-two length");
        self.psi.analyze(&z)
    }
}

/// Largest relative mismatch `|⟨Au, v⟩ − ⟨u, Aᵀv⟩| / (‖Au‖‖v‖)` over
/// `pairs` random Gaussian pairs.
pub fn adjoint_mismatch<A: LinearOperator + ?Sized>(op: &A, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let u: Vec<f64> = (0..op.cols()).map(|_| rng.sample(StandardNormal)).collect();
        let v: Vec<f64> = (0..op.rows()).map(|_| rng.sample(StandardNormal)).collect();
        let au = op.apply(&u);
        let atv = op.adjoint(&v);
        let lhs: f64 = au.iter().zip(&v).map(|(a, b)| a * b).sum();
        let rhs: f64 = u.iter().zip(&atv).map(|(a, b)| a * b).sum();
        let scale = au.iter().map(|a| a * a).sum::<f64>().sqrt() * v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Ordering;

    #[test]
    fn dense_adjoint() {
        let a = DenseMatrix::gaussian(5, 7, 1);
        assert!(adjoint_mismatch(&a, 20, 2) < 1e-12);
    }

    #[test]
    fn sensing_operator_adjoint() {
        for (ordering, sp) in [
            (Ordering::Walsh, Sparsifier::Dct1d),
            (Ordering::CakeCutting, Sparsifier::Dct2d),
            (Ordering::Random(3), Sparsifier::Dct1d),
        ] {
            let b = BasisMatrix::hadamard(64, ordering).unwrap();
            let op = SensingOperator::new(&b, 20, sp).unwrap();
            assert!(adjoint_mismatch(&op, 20, 5) < 1e-8);
        }
    }

    #[test]
    fn sensing_matches_dense_product() {
        let b = BasisMatrix::hadamard(16, Ordering::Walsh).unwrap();
        let op = SensingOperator::new(&b, 6, Sparsifier::Dct1d).unwrap();
        let s: Vec<f64> = (0..16).map(|i| (i as f64 * 0.3).sin()).collect();
        let x = crate::solver::dct_inverse(&s).unwrap();
        let got = op.apply(&s);
        for (i, g) in got.iter().enumerate() {
            let want: f64 = (0..16).map(|j| f64::from(b.entry(i, j)) * x[j]).sum();
            assert!((g - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_canonical_and_bad_row_counts() {
        let c = BasisMatrix::canonical(16).unwrap();
        assert_eq!(SensingOperator::new(&c, 4, Sparsifier::Dct1d).unwrap_err(), Error::NotHadamard);
        let h = BasisMatrix::hadamard(16, Ordering::Natural).unwrap();
        assert!(SensingOperator::new(&h, 0, Sparsifier::Dct1d).is_err());
        assert!(SensingOperator::new(&h, 17, Sparsifier::Dct1d).is_err());
    }
}
