use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // only needed without std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::slm::{wrap_phase, TWO_PI};
use crate::error::{invalid, Result};
use crate::grid::Grid2D;

/// Phase aberration placed in the beam path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    None,
    /// A glass edge: `phase_step` on one side of a straight line at
    /// `edge_angle` (radians) passing `edge_offset` px from the centre.
    GlassSlide {
        edge_angle: f64,
        phase_step: f64,
        edge_offset: f64,
    },
    /// Thin scatterer: i.i.d. uniform phases on cells of `correlation_px`.
    RandomScreen { seed: u64, correlation_px: usize },
}

impl Perturbation {
    pub fn glass() -> Self {
        Perturbation::GlassSlide {
            edge_angle: PI / 6.0,
            phase_step: PI,
            edge_offset: 0.0,
        }
    }

    pub fn scatterer(seed: u64) -> Self {
        Perturbation::RandomScreen {
            seed,
            correlation_px: 2,
        }
    }

    /// Short name used in file names and result tables.
    pub fn label(&self) -> &'static str {
        match self {
            Perturbation::None => "none",
            Perturbation::GlassSlide { .. } => "glass",
            Perturbation::RandomScreen { .. } => "scatterer",
        }
    }

    /// Phase screen over a `side x side` aperture, values in `[0, 2π)`.
    pub fn render(&self, side: usize) -> Result<Grid2D<f64>> {
        match *self {
            Perturbation::None => Ok(Grid2D::filled(side, 0.0)),
            Perturbation::GlassSlide {
                edge_angle,
                phase_step,
                edge_offset,
            } => {
                if !(edge_angle.is_finite() && phase_step.is_finite() && edge_offset.is_finite()) {
                    return Err(invalid("glass slide parameters must be finite"));
                }
                let c = (side as f64 - 1.0) / 2.0;
                let (s, co) = edge_angle.sin_cos();
                let step = wrap_phase(phase_step);
                Ok(Grid2D::from_fn(side, |r, k| {
                    let d = (r as f64 - c) * -s + (k as f64 - c) * co - edge_offset;
                    if d > 0.0 {
                        step
                    } else {
                        0.0
                    }
                }))
            }
            Perturbation::RandomScreen { seed, correlation_px } => {
                if correlation_px == 0 {
                    return Err(invalid("correlation_px must be at least 1"));
                }
                let cells = side.div_ceil(correlation_px);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let coarse: Vec<f64> = (0..cells * cells).map(|_| rng.random::<f64>() * TWO_PI).collect();
                Ok(Grid2D::from_fn(side, |r, k| {
                    coarse[(r / correlation_px) * cells + k / correlation_px]
                }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glass_edge_splits_aperture() {
        let g = Perturbation::glass().render(64).unwrap();
        let stepped = g.values().iter().filter(|&&v| v == PI).count();
        let flat = g.values().iter().filter(|&&v| v == 0.0).count();
        assert_eq!(stepped + flat, 64 * 64);
        // Edge through the centre halves the square.
        assert!((stepped as f64 / 4096.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn random_screen_is_seeded_and_blocky() {
        let p = Perturbation::RandomScreen {
            seed: 5,
            correlation_px: 4,
        };
        let a = p.render(32).unwrap();
        assert_eq!(a, p.render(32).unwrap());
        assert_eq!(a.get(0, 0), a.get(3, 3));
        assert_ne!(a.get(0, 0), a.get(4, 0));
        assert!(a.values().iter().all(|&v| (0.0..TWO_PI).contains(&v)));
        let other = Perturbation::RandomScreen {
            seed: 6,
            correlation_px: 4,
        };
        assert_ne!(a, other.render(32).unwrap());
    }
}
