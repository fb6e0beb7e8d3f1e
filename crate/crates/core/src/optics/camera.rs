use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // only needed without std
use num_traits::Float;

use super::slm::TWO_PI;
use crate::error::{invalid, Error, Result};
use crate::fft::FftPlan;
use crate::grid::Grid2D;

/// Full-frame Fraunhofer transform of an SLM field: a centred 2-D DFT with
/// zero spatial frequency at `(side/2, side/2)`.
///
/// Unnormalised, so `Σ|out|² = side²·Σ|in|²`.
pub fn propagate(field: &Grid2D<Complex64>) -> Result<Grid2D<Complex64>> {
    let side = field.side();
    let plan = FftPlan::new(side)?;
    let mut data: Vec<Complex64> = field.values().to_vec();
    // (-1)^(r+c) moves the zero frequency to the centre.
    for (i, z) in data.iter_mut().enumerate() {
        if ((i / side) + (i % side)) % 2 == 1 {
            *z = -*z;
        }
    }
    for row in data.chunks_mut(side) {
        plan.forward(row);
    }
    let mut col = alloc::vec![Complex64::default(); side];
    for c in 0..side {
        for r in 0..side {
            col[r] = data[r * side + c];
        }
        plan.forward(&mut col);
        for r in 0..side {
            data[r * side + c] = col[r];
        }
    }
    Grid2D::new(side, data)
}

/// Camera looking at a zoomed window of the focal plane around the first
/// diffraction order.
///
/// Pixel `k` samples spatial frequency `center + (k - window/2)/(side·oversample)`
/// cycles per SLM pixel on each axis, so with `oversample = 1` pixels coincide
/// with full-frame DFT bins.
#[derive(Debug, Clone)]
pub struct Camera {
    side_px: usize,
    window_px: usize,
    oversample: usize,
    center_freq: f64,
    /// `window x side`, row `k` holds `exp(-2πi f_k u)`.
    kernel: Vec<Complex64>,
}

impl Camera {
    pub fn new(side_px: usize, window_px: usize, oversample: usize, center_freq: f64) -> Result<Self> {
        if side_px == 0 || window_px == 0 || oversample == 0 {
            return Err(invalid("camera dimensions must be positive"));
        }
        let mut kernel = Vec::with_capacity(window_px * side_px);
        for k in 0..window_px {
            let f = center_freq + (k as f64 - (window_px / 2) as f64) / (side_px * oversample) as f64;
            for u in 0..side_px {
                // Reduce the phase argument before evaluating the exponential.
                let t = f * u as f64;
                kernel.push(Complex64::from_polar(1.0, -TWO_PI * (t - t.floor())));
            }
        }
        Ok(Self {
            side_px,
            window_px,
            oversample,
            center_freq,
            kernel,
        })
    }

    pub fn window_px(&self) -> usize {
        self.window_px
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.center_freq + (k as f64 - (self.window_px / 2) as f64) / (self.side_px * self.oversample) as f64
    }

    pub fn kernel_row(&self, k: usize) -> &[Complex64] {
        &self.kernel[k * self.side_px..(k + 1) * self.side_px]
    }

    fn check(&self, field: &Grid2D<Complex64>) -> Result<()> {
        if field.side() != self.side_px {
            return Err(Error::DimensionMismatch {
                expected: self.side_px,
                actual: field.side(),
            });
        }
        Ok(())
    }

    /// Complex focal image over the camera window.
    pub fn image(&self, field: &Grid2D<Complex64>) -> Result<Grid2D<Complex64>> {
        self.check(field)?;
        let (s, w) = (self.side_px, self.window_px);
        // t[u][l] = Σ_v field[u][v]·K[l][v]
        let mut t = alloc::vec![Complex64::default(); s * w];
        for u in 0..s {
            let frow = &field.values()[u * s..(u + 1) * s];
            for l in 0..w {
                let krow = self.kernel_row(l);
                t[u * w + l] = frow.iter().zip(krow).map(|(a, b)| a * b).sum();
            }
        }
        let mut out = alloc::vec![Complex64::default(); w * w];
        for k in 0..w {
            let krow = self.kernel_row(k);
            let orow = &mut out[k * w..(k + 1) * w];
            for (u, kv) in krow.iter().enumerate() {
                let trow = &t[u * w..(u + 1) * w];
                for (o, tv) in orow.iter_mut().zip(trow) {
                    *o += kv * tv;
                }
            }
        }
        Grid2D::new(w, out)
    }

    /// Complex amplitude of a single camera pixel.
    pub fn amplitude_at(&self, field: &Grid2D<Complex64>, px: (usize, usize)) -> Result<Complex64> {
        self.check(field)?;
        let s = self.side_px;
        let (kr, kc) = (self.kernel_row(px.0), self.kernel_row(px.1));
        Ok(field
            .values()
            .chunks(s)
            .zip(kr)
            .map(|(row, a)| a * row.iter().zip(kc).map(|(f, b)| f * b).sum::<Complex64>())
            .sum())
    }
}
