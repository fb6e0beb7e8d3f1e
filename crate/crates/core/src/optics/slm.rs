use core::f64::consts::PI;

#[allow(unused_imports)] // only needed without std
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::Grid2D;

pub const TWO_PI: f64 = 2.0 * PI;

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi - TWO_PI * (phi / TWO_PI).floor();
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

/// Phase actually displayed by an SLM with `levels` grey levels.
pub fn quantize_phase(phi: f64, levels: Option<u32>) -> f64 {
    match levels {
        None => wrap_phase(phi),
        Some(l) => quantize_level(phi, l) as f64 * TWO_PI / f64::from(l),
    }
}

#[inline]
pub(crate) fn quantize_level(phi: f64, levels: u32) -> usize {
    let k = (phi / TWO_PI * f64::from(levels)).round() as i64;
    k.rem_euclid(i64::from(levels)) as usize
}

/// Blazed grating: a linear ramp along the diagonal, `2π` per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrismPhase {
    pub period_px: f64,
}

impl Default for PrismPhase {
    fn default() -> Self {
        Self { period_px: 20.0 }
    }
}

impl PrismPhase {
    pub fn new(period_px: f64) -> Result<Self> {
        if !(period_px >= 2.0) || !period_px.is_finite() {
            return Err(invalid("prism period must be at least 2 px"));
        }
        Ok(Self { period_px })
    }

    #[inline]
    pub fn phase_at(&self, row: usize, col: usize) -> f64 {
        let t = (row + col) as f64 / self.period_px;
        TWO_PI * (t - t.floor())
    }

    /// Spatial frequency of the ramp along each axis, in cycles per pixel.
    pub fn frequency(&self) -> f64 {
        1.0 / self.period_px
    }
}

/// What the SLM displays: a phase pattern over the illuminated aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct SlmPlane {
    pub side_px: usize,
    /// Displayed phase before grey-level quantisation, in `[0, 2π)`.
    pub phase: Grid2D<f64>,
    /// Incident amplitude envelope.
    pub amplitude: Grid2D<f64>,
    /// Number of SLM grey levels; `None` for an ideal continuous modulator.
    pub levels: Option<u32>,
}

impl SlmPlane {
    /// Gaussian envelope `exp(-r²/w²)` centred on the aperture.
    pub fn gaussian_amplitude(side_px: usize, waist_px: f64) -> Grid2D<f64> {
        let c = (side_px as f64 - 1.0) / 2.0;
        let w2 = waist_px * waist_px;
        Grid2D::from_fn(side_px, |r, k| {
            let (dr, dc) = (r as f64 - c, k as f64 - c);
            (-(dr * dr + dc * dc) / w2).exp()
        })
    }

    /// Field leaving the SLM, `A·exp(i(Q(φ + δ) + ψ))`, where `ψ` is the
    /// perturbation screen and `δ` a global phase offset.
    pub fn field(&self, screen: &Grid2D<f64>, delta: f64) -> Result<Grid2D<num_complex::Complex64>> {
        if screen.side() != self.side_px {
            return Err(crate::Error::DimensionMismatch {
                expected: self.side_px,
                actual: screen.side(),
            });
        }
        let values = self
            .phase
            .values()
            .iter()
            .zip(self.amplitude.values())
            .zip(screen.values())
            .map(|((&phi, &a), &psi)| {
                num_complex::Complex64::from_polar(a, quantize_phase(phi + delta, self.levels) + psi)
            })
            .collect();
        Grid2D::new(self.side_px, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_into_range() {
        assert_eq!(wrap_phase(0.0), 0.0);
        assert!((wrap_phase(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!((wrap_phase(5.0 * PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn pi_offset_is_exact_in_levels() {
        for k in 0..40 {
            let phi = 0.173 * f64::from(k);
            let a = quantize_level(phi, 256);
            let b = quantize_level(wrap_phase(phi + PI), 256);
            assert_eq!((a + 128) % 256, b);
        }
    }

    #[test]
    fn prism_advances_two_pi_per_period() {
        let p = PrismPhase::new(20.0).unwrap();
        assert_eq!(p.phase_at(0, 0), 0.0);
        assert!((p.phase_at(5, 0) - PI / 2.0).abs() < 1e-12);
        assert!((p.phase_at(3, 7) - PI).abs() < 1e-12);
        assert_eq!(p.phase_at(13, 7), 0.0);
        assert!(PrismPhase::new(1.5).is_err());
    }
}
