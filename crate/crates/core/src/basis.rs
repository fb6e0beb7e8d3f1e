//! Measurement bases: the canonical (identity) basis and the Sylvester
//! Hadamard basis with natural, sequency (Walsh), cake-cutting and random row
//! orderings.
//!
//! Entries are never stored. A Hadamard basis is the natural Sylvester matrix
//! `H[i][j] = (-1)^popcount(i & j)` plus a row permutation, so any entry is
//! available in O(1) and `apply`/`solve` run through the fast Walsh–Hadamard
//! transform.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Seed used when `random` is requested without an explicit seed.
pub const DEFAULT_RANDOM_SEED: u64 = 20_240_607;

/// Row ordering of a Hadamard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ordering {
    Natural,
    Walsh,
    CakeCutting,
    Random(u64),
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordering::Natural => f.write_str("natural"),
            Ordering::Walsh => f.write_str("walsh"),
            Ordering::CakeCutting => f.write_str("cake"),
            Ordering::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "natural" => return Ok(Ordering::Natural),
            "walsh" => return Ok(Ordering::Walsh),
            "cake" => return Ok(Ordering::CakeCutting),
            "random" => return Ok(Ordering::Random(DEFAULT_RANDOM_SEED)),
            _ => {}
        }
        t.strip_prefix("random:")
            .and_then(|seed| seed.trim().parse().ok())
            .map(Ordering::Random)
            .ok_or_else(|| Error::ParseOrdering(t.to_string()))
    }
}

impl Serialize for Ordering {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordering {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Canonical,
    Hadamard,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::Canonical => f.write_str("canonical"),
            BasisKind::Hadamard => f.write_str("hadamard"),
        }
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "canonical" | "can" => Ok(BasisKind::Canonical),
            "hadamard" | "h" => Ok(BasisKind::Hadamard),
            other => Err(Error::InvalidParameter(alloc::format!("unknown basis `{other}`"))),
        }
    }
}

/// Values a basis can act on: reals for intensities, complex numbers for
/// focal amplitudes.
pub trait Sample: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Sample for T where T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// An `n x n` measurement basis with `n = 4^k`.
///
/// Row `i` of the basis is row `perm[i]` of the natural matrix (identity for
/// canonical, Sylvester for Hadamard).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMatrix {
    n: usize,
    kind: BasisKind,
    ordering: Ordering,
    perm: Vec<usize>,
}

pub fn is_power_of_four(n: usize) -> bool {
    n >= 4 && n.is_power_of_two() && n.trailing_zeros().is_multiple_of(2)
}

fn check_size(n: usize) -> Result<()> {
    if is_power_of_four(n) {
        Ok(())
    } else {
        Err(Error::NotPowerOfFour(n))
    }
}

/// Sylvester-ordered Hadamard basis with the identity permutation.
pub fn hadamard_natural(n: usize) -> Result<BasisMatrix> {
    check_size(n)?;
    Ok(BasisMatrix {
        n,
        kind: BasisKind::Hadamard,
        ordering: Ordering::Natural,
        perm: (0..n).collect(),
    })
}

/// Entry `(i, j)` of the natural Sylvester Hadamard matrix.
#[inline]
pub fn sylvester_entry(i: usize, j: usize) -> i8 {
    if (i & j).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Number of adjacent index pairs with opposite sign.
pub fn sign_changes(row: &[i8]) -> usize {
    row.windows(2).filter(|w| (w[0] > 0) != (w[1] > 0)).count()
}

/// Number of 4-connected regions of `+1` cells in the row-major `side x side`
/// reshape of `row`.
pub fn plus_components(row: &[i8], side: usize) -> usize {
    debug_assert_eq!(row.len(), side * side);
    // Two-pass labelling with union-find.
    let mut parent: Vec<usize> = (0..row.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for r in 0..side {
        for c in 0..side {
            let i = r * side + c;
            if row[i] <= 0 {
                continue;
            }
            if c > 0 && row[i - 1] > 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, i - 1));
                parent[a] = b;
            }
            if r > 0 && row[i - side] > 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, i - side));
                parent[a] = b;
            }
        }
    }
    (0..row.len())
        .filter(|&i| row[i] > 0 && find(&mut parent, i) == i)
        .count()
}

/// In-place fast Walsh–Hadamard transform in natural (Sylvester) order,
/// equal to the dense product `H v`. Unnormalised: applying it twice scales
/// by `n`.
pub fn fwht<T>(v: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for j in start..start + h {
                let a = v[j];
                let b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    Ok(())
}

fn isqrt_exact(n: usize) -> Option<usize> {
    let mut s = num_traits::Float::sqrt(n as f64) as usize;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    (s * s == n).then_some(s)
}

/// Row-major reshape of a length-`side²` vector into a square grid.
pub fn reshape_2d<T: Clone>(v: &[T]) -> Result<Grid2D<T>> {
    let side = isqrt_exact(v.len()).filter(|&s| s > 0).ok_or(Error::NotSquare(v.len()))?;
    Grid2D::new(side, v.to_vec())
}

impl BasisMatrix {
    pub fn canonical(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self {
            n,
            kind: BasisKind::Canonical,
            ordering: Ordering::Natural,
            perm: (0..n).collect(),
        })
    }

    /// Hadamard basis of size `n` in the requested ordering.
    pub fn hadamard(n: usize, ordering: Ordering) -> Result<Self> {
        let natural = hadamard_natural(n)?;
        match ordering {
            Ordering::Natural => Ok(natural),
            Ordering::Walsh => natural.walsh_order(),
            Ordering::CakeCutting => natural.cake_cutting_order(),
            Ordering::Random(seed) => natural.random_order(seed),
        }
    }

    pub fn new(kind: BasisKind, n: usize, ordering: Ordering) -> Result<Self> {
        match kind {
            BasisKind::Canonical if ordering == Ordering::Natural => Self::canonical(n),
            BasisKind::Canonical => Err(Error::NotHadamard),
            BasisKind::Hadamard => Self::hadamard(n, ordering),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << (self.n.trailing_zeros() / 2)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    /// Row permutation: row `i` is natural row `perm()[i]`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        let r = self.perm[i];
        match self.kind {
            BasisKind::Canonical => i8::from(r == j),
            BasisKind::Hadamard => sylvester_entry(r, j),
        }
    }

    pub fn row(&self, i: usize) -> Vec<i8> {
        (0..self.n).map(|j| self.entry(i, j)).collect()
    }

    /// Dense `n x n` materialisation, row-major. Intended for tests and small
    /// bases.
    pub fn dense(&self) -> Vec<i8> {
        (0..self.n).flat_map(|i| self.row(i)).collect()
    }

    fn require_hadamard(&self) -> Result<()> {
        match self.kind {
            BasisKind::Hadamard => Ok(()),
            BasisKind::Canonical => Err(Error::NotHadamard),
        }
    }

    /// Stable sort of the current rows by `key`.
    fn sorted_by_key(&self, ordering: Ordering, key: impl Fn(&[i8]) -> usize) -> Self {
        let keys: Vec<usize> = (0..self.n).map(|i| key(&self.row(i))).collect();
        let mut idx: Vec<usize> = (0..self.n).collect();
        idx.sort_by_key(|&i| keys[i]);
        Self {
            perm: idx.iter().map(|&i| self.perm[i]).collect(),
            ordering,
            ..self.clone()
        }
    }

    /// Sequency ordering: rows sorted by ascending number of sign changes.
    pub fn walsh_order(&self) -> Result<Self> {
        self.require_hadamard()?;
        let sorted = self.sorted_by_key(Ordering::Walsh, sign_changes);
        debug_assert!((0..self.n).all(|k| sign_changes(&sorted.row(k)) == k));
        Ok(sorted)
    }

    /// Cake-cutting ordering: rows sorted by the number of 4-connected `+1`
    /// regions in their `sqrt(n) x sqrt(n)` reshape; ties keep the current
    /// order.
    pub fn cake_cutting_order(&self) -> Result<Self> {
        self.require_hadamard()?;
        let side = self.side();
        Ok(self.sorted_by_key(Ordering::CakeCutting, |row| plus_components(row, side)))
    }

    /// Seeded Fisher–Yates shuffle of the current rows.
    pub fn random_order(&self, seed: u64) -> Result<Self> {
        self.require_hadamard()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<usize> = (0..self.n).collect();
        idx.shuffle(&mut rng);
        Ok(Self {
            perm: idx.iter().map(|&i| self.perm[i]).collect(),
            ordering: Ordering::Random(seed),
            ..self.clone()
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                actual: len,
            })
        }
    }

    /// `y = B v`.
    pub fn apply<T: Sample>(&self, v: &[T]) -> Result<Vec<T>> {
        self.check_len(v.len())?;
        match self.kind {
            BasisKind::Canonical => Ok(self.perm.iter().map(|&r| v[r]).collect()),
            BasisKind::Hadamard => {
                let mut w = v.to_vec();
                fwht(&mut w)?;
                Ok(self.perm.iter().map(|&r| w[r]).collect())
            }
        }
    }

    /// Solves `B v = y`. For Hadamard bases `B⁻¹ = Bᵀ / n`.
    pub fn solve<T: Sample>(&self, y: &[T]) -> Result<Vec<T>> {
        self.check_len(y.len())?;
        let mut z = alloc::vec![T::default(); self.n];
        for (i, &r) in self.perm.iter().enumerate() {
            z[r] = y[i];
        }
        if self.kind == BasisKind::Hadamard {
            fwht(&mut z)?;
            let scale = 1.0 / self.n as f64;
            z.iter_mut().for_each(|x| *x = *x * scale);
        }
        Ok(z)
    }

    /// Transpose product `Bᵀ y` restricted to the first `y.len()` rows.
    pub fn adjoint_partial<T: Sample>(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: y.len(),
            });
        }
        let mut z = alloc::vec![T::default(); self.n];
        for (i, &v) in y.iter().enumerate() {
            z[self.perm[i]] = v;
        }
        match self.kind {
            BasisKind::Canonical => Ok(z),
            BasisKind::Hadamard => {
                fwht(&mut z)?;
                Ok(z)
            }
        }
    }
}
