use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::basis::{is_power_of_four, BasisKind, Ordering, DEFAULT_RANDOM_SEED};
use crate::error::{invalid, Error, Result};
use crate::optics::{BenchConfig, DetectorModel, Exposure, Perturbation};
use crate::solver::{SolverOptions, Sparsifier};

/// Camera settings relative to the bench's own light level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSpec {
    /// ADC bit depth; `None` (written as 0) disables quantisation.
    #[serde(with = "crate::serde_util::zero_is_none")]
    pub quant_bits: Option<u32>,
    /// Read-noise standard deviation as a fraction of full scale.
    pub read_noise_fs: f64,
    pub shot_noise: bool,
    pub full_well: f64,
    /// Full scale as a multiple of the unperturbed first-order peak signal
    /// at the reference exposure.
    pub full_scale_rel: f64,
}

impl DetectorSpec {
    /// The single-pixel interferogram camera: the unperturbed spot would read
    /// 1.3× full scale after 1 ms.
    pub fn interferometric() -> Self {
        Self {
            quant_bits: Some(10),
            read_noise_fs: 8e-4,
            shot_noise: true,
            full_well: 20_000.0,
            full_scale_rel: 1.0 / 1.3,
        }
    }

    /// The spot camera: 16 bits, unperturbed spot at 80 % of full scale.
    pub fn photo() -> Self {
        Self {
            quant_bits: Some(16),
            read_noise_fs: 1e-5,
            shot_noise: true,
            full_well: 1e6,
            full_scale_rel: 1.25,
        }
    }

    pub fn noiseless() -> Self {
        Self {
            quant_bits: None,
            read_noise_fs: 0.0,
            shot_noise: false,
            full_well: f64::INFINITY,
            full_scale_rel: f64::INFINITY,
        }
    }

    /// Concrete model for a bench whose reference signal (peak intensity ×
    /// reference exposure) is `reference_signal`.
    pub fn model(&self, reference_signal: f64, exposure_ms: f64, seed: u64) -> Result<DetectorModel> {
        let full_scale = self.full_scale_rel * reference_signal;
        let read = if full_scale.is_finite() {
            self.read_noise_fs * full_scale
        } else {
            0.0
        };
        let model = DetectorModel {
            exposure_ms,
            quant_bits: self.quant_bits,
            full_scale,
            shot_noise: self.shot_noise,
            full_well: self.full_well,
            read_noise_sigma: read,
            rng_seed: seed,
        };
        model.validate()?;
        Ok(model)
    }
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self::interferometric()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedExposure {
    pub basis: BasisKind,
    /// Perturbation label (`none`, `glass`, `scatterer`); any if absent.
    #[serde(default)]
    pub perturbation: Option<String>,
    pub ms: f64,
}

/// Exposure per (basis, perturbation). Interferograms are metered against
/// full scale and capped, unless a fixed value is configured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExposureSchedule {
    pub cap_ms: f64,
    /// Target fraction of full scale for the brightest interferogram.
    pub fill: f64,
    pub fixed: Vec<FixedExposure>,
    /// Spot-photo exposure; defaults to 0.1 ms, or 0.65 ms for a scatterer.
    pub spot_ms: Option<f64>,
}

impl Default for ExposureSchedule {
    fn default() -> Self {
        Self {
            cap_ms: 65.0,
            fill: 0.8,
            fixed: Vec::new(),
            spot_ms: None,
        }
    }
}

impl ExposureSchedule {
    pub fn interferometric(&self, basis: BasisKind, perturbation: &str) -> Exposure {
        self.fixed
            .iter()
            .find(|f| f.basis == basis && f.perturbation.as_deref().is_none_or(|p| p == perturbation))
            .map(|f| Exposure::Fixed(f.ms.min(self.cap_ms)))
            .unwrap_or(Exposure::Metered {
                cap_ms: self.cap_ms,
                fill: self.fill,
            })
    }

    pub fn spot(&self, perturbation: &str) -> f64 {
        self.spot_ms.unwrap_or(if perturbation == "scatterer" { 0.65 } else { 0.1 })
    }
}

/// Noise tolerance handed to basis pursuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPolicy {
    Zero,
    Fixed(f64),
    /// `sqrt(Σ var(b_i))` over the selected measurements, from the detector
    /// noise model.
    NoiseFloor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub sigma: SigmaPolicy,
    pub sparsifier: Sparsifier,
    pub options: SolverOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            sigma: SigmaPolicy::NoiseFloor,
            sparsifier: Sparsifier::Dct1d,
            options: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub perturbation: Perturbation,
    pub n_list: Vec<usize>,
    pub bases: Vec<BasisKind>,
    pub orderings: Vec<Ordering>,
    pub cr_grid: Vec<f64>,
    pub exposures: ExposureSchedule,
    pub bench: BenchConfig,
    pub detector: DetectorSpec,
    pub photo: DetectorSpec,
    pub solver: SolverConfig,
    /// Edge of the square SNR window around the first-order spot.
    pub roi_px: usize,
    pub master_seed: u64,
    pub output_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            perturbation: Perturbation::glass(),
            n_list: vec![64, 256, 1024, 4096],
            bases: vec![BasisKind::Canonical, BasisKind::Hadamard],
            orderings: vec![
                Ordering::Natural,
                Ordering::Walsh,
                Ordering::CakeCutting,
                Ordering::Random(DEFAULT_RANDOM_SEED),
            ],
            cr_grid: vec![0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            exposures: ExposureSchedule::default(),
            bench: BenchConfig::default(),
            detector: DetectorSpec::interferometric(),
            photo: DetectorSpec::photo(),
            solver: SolverConfig::default(),
            roi_px: 64,
            master_seed: 1,
            output_dir: "results".to_string(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(invalid("n_list is empty"));
        }
        for &n in &self.n_list {
            if !is_power_of_four(n) {
                return Err(Error::NotPowerOfFour(n));
            }
            let grid_side = 1usize << (n.trailing_zeros() / 2);
            if !self.bench.side_px.is_multiple_of(grid_side) {
                return Err(Error::IncompatibleGrid {
                    side_px: self.bench.side_px,
                    grid_side,
                });
            }
        }
        if let Some(cr) = self.cr_grid.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
            return Err(invalid(alloc::format!("compression ratio {cr} is outside (0, 1]")));
        }
        if !(self.exposures.cap_ms > 0.0) || !(self.exposures.fill > 0.0) {
            return Err(invalid("exposure cap and fill must be positive"));
        }
        if self.exposures.fixed.iter().any(|f| !(f.ms > 0.0)) || self.exposures.spot_ms.is_some_and(|s| !(s > 0.0)) {
            return Err(invalid("exposures must be positive"));
        }
        if self.roi_px == 0 || self.roi_px > self.bench.camera_window_px {
            return Err(invalid("roi_px must be between 1 and the camera window"));
        }
        if let SigmaPolicy::Fixed(s) = self.solver.sigma {
            if !(s >= 0.0) {
                return Err(invalid("sigma must be non-negative"));
            }
        }
        Ok(())
    }
}
