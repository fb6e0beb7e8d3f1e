use num_complex::Complex64;
#[allow(unused_imports)] // only needed without std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::Grid2D;

/// Camera pixel model. Intensities are in units of `|field|²·ms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub exposure_ms: f64,
    /// Bit depth of the ADC; `None` disables quantisation.
    pub quant_bits: Option<u32>,
    /// Saturation level.
    pub full_scale: f64,
    pub shot_noise: bool,
    /// Electrons at full scale; sets the shot-noise variance
    /// `signal·full_scale/full_well`.
    pub full_well: f64,
    pub read_noise_sigma: f64,
    pub rng_seed: u64,
}

impl DetectorModel {
    /// Noise-free, unquantised and unsaturable.
    pub fn ideal(exposure_ms: f64) -> Self {
        Self {
            exposure_ms,
            quant_bits: None,
            full_scale: f64::INFINITY,
            shot_noise: false,
            full_well: f64::INFINITY,
            read_noise_sigma: 0.0,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exposure_ms > 0.0) {
            return Err(invalid("exposure must be positive"));
        }
        if !(self.full_scale > 0.0) {
            return Err(invalid("full scale must be positive"));
        }
        if self.quant_bits.is_some() && !self.full_scale.is_finite() {
            return Err(invalid("quantisation needs a finite full scale"));
        }
        if matches!(self.quant_bits, Some(b) if b == 0 || b > 32) {
            return Err(invalid("quant_bits must be in 1..=32"));
        }
        if self.shot_noise && !(self.full_well > 0.0 && self.full_scale.is_finite()) {
            return Err(invalid("shot noise needs a positive full well and finite full scale"));
        }
        if !(self.read_noise_sigma >= 0.0) {
            return Err(invalid("read noise must be non-negative"));
        }
        Ok(())
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        Self { rng_seed, ..self }
    }

    pub fn is_noiseless(&self) -> bool {
        !self.shot_noise && self.read_noise_sigma == 0.0
    }

    /// Counter-based stream: the same `(seed, stream)` always yields the
    /// same draws regardless of evaluation order.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(stream);
        rng
    }

    fn step(&self) -> Option<f64> {
        self.quant_bits
            .map(|b| self.full_scale / ((1u64 << b) - 1) as f64)
    }

    /// Standard deviation of one reading at a given (noiseless) signal,
    /// including the quantisation floor.
    pub fn noise_sigma(&self, signal: f64) -> f64 {
        let mut var = self.read_noise_sigma * self.read_noise_sigma;
        if self.shot_noise {
            var += signal.max(0.0) * self.full_scale / self.full_well;
        }
        if let Some(q) = self.step() {
            var += q * q / 12.0;
        }
        var.sqrt()
    }

    /// One pixel reading. Returns the value and whether it saturated.
    pub fn sample<R: Rng>(&self, intensity: f64, exposure_ms: f64, rng: &mut R) -> (f64, bool) {
        let mut s = intensity * exposure_ms;
        if self.shot_noise {
            let z: f64 = rng.sample(StandardNormal);
            s += z * (s.max(0.0) * self.full_scale / self.full_well).sqrt();
        }
        if self.read_noise_sigma > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            s += z * self.read_noise_sigma;
        }
        let saturated = s > self.full_scale;
        s = s.clamp(0.0, self.full_scale);
        if let Some(q) = self.step() {
            s = (s / q).round() * q;
        }
        (s, saturated)
    }
}

/// Exposure choice for a measurement run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exposure {
    Fixed(f64),
    /// Longest exposure that keeps the brightest noiseless reading at
    /// `fill·full_scale`, but no longer than `cap_ms`.
    Metered { cap_ms: f64, fill: f64 },
}

impl Exposure {
    pub fn resolve(&self, detector: &DetectorModel, brightest: f64) -> Result<f64> {
        let e = match *self {
            Exposure::Fixed(ms) => ms,
            Exposure::Metered { cap_ms, fill } => {
                if !(fill > 0.0) || !(cap_ms > 0.0) {
                    return Err(invalid("metered exposure needs positive cap and fill"));
                }
                if brightest > 0.0 && detector.full_scale.is_finite() {
                    (fill * detector.full_scale / brightest).min(cap_ms)
                } else {
                    cap_ms
                }
            }
        };
        if !(e > 0.0) || !e.is_finite() {
            return Err(invalid("exposure must be positive"));
        }
        Ok(e)
    }
}

/// Records a complex focal image: `exposure·|field|²` plus noise, clipped and
/// quantised.
pub fn detect(image: &Grid2D<Complex64>, detector: &DetectorModel, exposure_ms: f64, stream: u64) -> Result<Grid2D<f64>> {
    detect_intensity(&image.map(|z| z.norm_sqr()), detector, exposure_ms, stream)
}

pub fn detect_intensity(intensity: &Grid2D<f64>, detector: &DetectorModel, exposure_ms: f64, stream: u64) -> Result<Grid2D<f64>> {
    DetectorModel { exposure_ms, ..*detector }.validate()?;
    let mut rng = detector.rng(stream);
    Ok(intensity.map(|&v| detector.sample(v, exposure_ms, &mut rng).0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn image() -> Grid2D<Complex64> {
        Grid2D::new(
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(0.5, 0.5),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn ideal_detector_reports_exact_intensity() {
        let d = DetectorModel::ideal(1.0);
        let out = detect(&image(), &d, 2.5, 0).unwrap();
        assert_eq!(out.values(), &[2.5, 10.0, 1.25, 0.0]);
        let twice = detect(&image(), &d, 5.0, 0).unwrap();
        for (a, b) in out.values().iter().zip(twice.values()) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn saturates_at_full_scale() {
        let d = DetectorModel {
            full_scale: 3.0,
            ..DetectorModel::ideal(1.0)
        };
        let out = detect(&image(), &d, 1.0, 0).unwrap();
        assert_eq!(out.values(), &[1.0, 3.0, 0.5, 0.0]);
    }

    #[test]
    fn quantises_to_levels() {
        let d = DetectorModel {
            full_scale: 3.0,
            quant_bits: Some(2),
            ..DetectorModel::ideal(1.0)
        };
        let out = detect(&image(), &d, 1.0, 0).unwrap();
        assert_eq!(out.values(), &[1.0, 3.0, 1.0, 0.0]);
    }

    #[test]
    fn noise_is_reproducible_per_stream() {
        let d = DetectorModel {
            full_scale: 10.0,
            read_noise_sigma: 0.1,
            shot_noise: true,
            full_well: 1000.0,
            ..DetectorModel::ideal(1.0)
        }
        .with_seed(9);
        let a = detect(&image(), &d, 1.0, 3).unwrap();
        assert_eq!(a, detect(&image(), &d, 1.0, 3).unwrap());
        assert_ne!(a, detect(&image(), &d, 1.0, 4).unwrap());
    }

    #[test]
    fn rejects_nonpositive_exposure() {
        assert!(detect(&image(), &DetectorModel::ideal(1.0), 0.0, 0).is_err());
    }

    #[test]
    fn metered_exposure_respects_cap() {
        let d = DetectorModel {
            full_scale: 1.0,
            ..DetectorModel::ideal(1.0)
        };
        let m = Exposure::Metered { cap_ms: 65.0, fill: 0.8 };
        assert!((m.resolve(&d, 0.1).unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(m.resolve(&d, 1e-6).unwrap(), 65.0);
        assert_eq!(Exposure::Fixed(2.0).resolve(&d, 1e9).unwrap(), 2.0);
    }
}
