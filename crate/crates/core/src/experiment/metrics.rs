use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // only needed without std
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Fractional ranks starting at 1; ties share their average rank.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = alloc::vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 || x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(invalid("Spearman correlation needs at least two finite pairs"));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(invalid("Spearman correlation of a constant sequence"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// `1 − |mean(e^{iφ})|`: 0 for identical phases, near 1 for uniform ones.
pub fn circular_variance(phases: &[f64]) -> f64 {
    if phases.is_empty() {
        return 0.0;
    }
    let mean: Complex64 = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).sum::<Complex64>() / phases.len() as f64;
    1.0 - mean.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(ranks(&[10.0, 20.0, 10.0, 5.0]), alloc::vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn spearman_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[1.0, 8.0, 27.0, 64.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        // Hand-computed: ranks (1,2,3,4) vs (2,1,4,3) → 1 − 6·4/(4·15) = 0.6.
        assert!((spearman(&x, &[2.0, 1.0, 4.0, 3.0]).unwrap() - 0.6).abs() < 1e-12);
        assert!(spearman(&x, &[1.0; 4]).is_err());
    }

    #[test]
    fn circular_variance_bounds() {
        assert!(circular_variance(&[0.3; 10]) < 1e-12);
        assert!((circular_variance(&[0.0, core::f64::consts::PI]) - 1.0).abs() < 1e-12);
    }
}
