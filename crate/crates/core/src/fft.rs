//! Radix-2 complex FFT used by the DCT and the full-frame propagator.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // only needed without std
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct FftPlan {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub(crate) fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let theta = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Ok(Self { n, twiddles, bitrev })
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// In-place forward transform, `X_k = sum_j x_j exp(-2 pi i jk / n)`.
    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, false);
    }

    /// In-place unnormalised inverse transform.
    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, true);
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(buf.len(), n, "FFT buffer length");
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    let t = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc + v * Complex64::new(t.cos(), t.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        let x: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut y = x.clone();
        FftPlan::new(64).unwrap().forward(&mut y);
        for (a, b) in y.iter().zip(dft(&x)) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let plan = FftPlan::new(16).unwrap();
        let x: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let mut y = x.clone();
        plan.forward(&mut y);
        plan.inverse(&mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 16.0 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(FftPlan::new(12).unwrap_err(), Error::NotPowerOfTwo(12));
        assert!(FftPlan::new(1).is_ok());
    }
}
