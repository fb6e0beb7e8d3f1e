use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // only needed without std
use num_traits::Float;

use crate::error::Result;
use crate::fft::FftPlan;

/// Orthonormal DCT-II / DCT-III pair of a fixed power-of-two length,
/// evaluated with one complex FFT after an even/odd reordering.
#[derive(Debug, Clone)]
pub struct Dct {
    plan: FftPlan,
    /// `exp(-iπk/2n)`
    twiddle: Vec<Complex64>,
}

impl Dct {
    pub fn new(n: usize) -> Result<Self> {
        let plan = FftPlan::new(n)?;
        let twiddle = (0..n)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2 * n) as f64))
            .collect();
        Ok(Self { plan, twiddle })
    }

    pub fn len(&self) -> usize {
        self.plan.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn scale(&self, k: usize) -> f64 {
        let n = self.len() as f64;
        if k == 0 {
            (1.0 / n).sqrt()
        } else {
            (2.0 / n).sqrt()
        }
    }

    /// `s = Ψᵀ x`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n, "DCT length mismatch");
        let mut v = alloc::vec![Complex64::default(); n];
        for k in 0..n.div_ceil(2) {
            v[k] = Complex64::new(x[2 * k], 0.0);
        }
        for k in 0..n / 2 {
            v[n - 1 - k] = Complex64::new(x[2 * k + 1], 0.0);
        }
        self.plan.forward(&mut v);
        (0..n).map(|k| (v[k] * self.twiddle[k]).re * self.scale(k)).collect()
    }

    /// `x = Ψ s`.
    pub fn inverse(&self, s: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(s.len(), n, "DCT length mismatch");
        let y: Vec<f64> = (0..n).map(|k| s[k] / self.scale(k)).collect();
        let mut v: Vec<Complex64> = (0..n)
            .map(|k| {
                let w = if k == 0 {
                    Complex64::new(y[0], 0.0)
                } else {
                    Complex64::new(y[k], -y[n - k])
                };
                w * self.twiddle[k].conj()
            })
            .collect();
        self.plan.inverse(&mut v);
        let inv_n = 1.0 / n as f64;
        let mut x = alloc::vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            x[2 * k] = v[k].re * inv_n;
        }
        for k in 0..n / 2 {
            x[2 * k + 1] = v[n - 1 - k].re * inv_n;
        }
        x
    }
}

/// Orthonormal DCT-II of `x`.
pub fn dct_forward(x: &[f64]) -> Result<Vec<f64>> {
    Ok(Dct::new(x.len())?.forward(x))
}

/// Orthonormal DCT-III of `s`, the inverse of [`dct_forward`].
pub fn dct_inverse(s: &[f64]) -> Result<Vec<f64>> {
    Ok(Dct::new(s.len())?.inverse(s))
}
