use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::camera::Camera;
use super::detector::DetectorModel;
use super::perturbation::Perturbation;
use super::slm::{wrap_phase, PrismPhase, SlmPlane};
use crate::basis::{is_power_of_four, BasisKind, BasisMatrix};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid2D;
use crate::interferometry::{ComplexField, PHASE_SHIFTS};

/// Geometry and optics of the simulated bench.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub side_px: usize,
    /// Gaussian waist of the incident beam; `None` means `side_px / 2`.
    pub waist_px: Option<f64>,
    pub period_px: f64,
    /// SLM grey levels; `None` (written as 0) for a continuous modulator.
    #[serde(with = "crate::serde_util::zero_is_none")]
    pub phase_levels: Option<u32>,
    /// Reference amplitude at the detection pixel relative to the
    /// unperturbed first-order amplitude.
    pub reference_ratio: f64,
    pub camera_window_px: usize,
    pub camera_oversample: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            side_px: 512,
            waist_px: None,
            period_px: 20.0,
            phase_levels: Some(256),
            reference_ratio: 0.1,
            camera_window_px: 128,
            camera_oversample: 4,
        }
    }
}

/// Everything held fixed during an experiment.
#[derive(Debug, Clone)]
pub struct BenchState {
    config: BenchConfig,
    prism: PrismPhase,
    perturbation: Perturbation,
    amplitude: Grid2D<f64>,
    screen: Grid2D<f64>,
    incident: Vec<Complex64>,
    camera: Camera,
    detect_px: (usize, usize),
    unperturbed_amp: Complex64,
    unperturbed_peak: f64,
    reference_amp: Complex64,
    detector: DetectorModel,
    photo: DetectorModel,
}

impl BenchState {
    /// Builds the bench and locates the first-order spot on the unperturbed
    /// plain prism. Both detectors start out ideal with 1 ms exposure.
    pub fn new(config: &BenchConfig, perturbation: Perturbation) -> Result<Self> {
        let side = config.side_px;
        if side < 2 {
            return Err(invalid("SLM side must be at least 2 px"));
        }
        let waist = config.waist_px.unwrap_or(side as f64 / 2.0);
        if !(waist > 0.0) {
            return Err(invalid("beam waist must be positive"));
        }
        if matches!(config.phase_levels, Some(l) if l < 2) {
            return Err(invalid("an SLM needs at least 2 phase levels"));
        }
        if !(config.reference_ratio >= 0.0) || !config.reference_ratio.is_finite() {
            return Err(invalid("reference ratio must be non-negative"));
        }
        let prism = PrismPhase::new(config.period_px)?;
        let amplitude = SlmPlane::gaussian_amplitude(side, waist);
        let screen = perturbation.render(side)?;
        let incident = amplitude
            .values()
            .iter()
            .zip(screen.values())
            .map(|(&a, &psi)| Complex64::from_polar(a, psi))
            .collect();
        let camera = Camera::new(side, config.camera_window_px, config.camera_oversample, prism.frequency())?;
        let mut bench = Self {
            config: config.clone(),
            prism,
            perturbation,
            amplitude,
            screen,
            incident,
            camera,
            detect_px: (0, 0),
            unperturbed_amp: Complex64::default(),
            unperturbed_peak: 0.0,
            reference_amp: Complex64::default(),
            detector: DetectorModel::ideal(1.0),
            photo: DetectorModel::ideal(1.0),
        };
        let flat = Grid2D::filled(side, 0.0);
        let spot = bench.camera.image(&bench.plain_prism().field(&flat, 0.0)?)?;
        let intensity = spot.map(|z| z.norm_sqr());
        bench.detect_px = intensity.argmax();
        bench.unperturbed_peak = intensity.max();
        bench.unperturbed_amp = *spot.get(bench.detect_px.0, bench.detect_px.1);
        bench.reference_amp = Complex64::new(config.reference_ratio * bench.unperturbed_amp.norm(), 0.0);
        Ok(bench)
    }

    pub fn with_detector(mut self, detector: DetectorModel) -> Result<Self> {
        detector.validate()?;
        self.detector = detector;
        Ok(self)
    }

    pub fn with_photo_detector(mut self, photo: DetectorModel) -> Result<Self> {
        photo.validate()?;
        self.photo = photo;
        Ok(self)
    }

    pub fn with_reference(mut self, reference_amp: Complex64) -> Self {
        self.reference_amp = reference_amp;
        self
    }

    pub fn config(&self) -> &BenchConfig {
        &self.config
    }

    pub fn side_px(&self) -> usize {
        self.config.side_px
    }

    pub fn prism(&self) -> PrismPhase {
        self.prism
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }

    pub fn screen(&self) -> &Grid2D<f64> {
        &self.screen
    }

    pub fn camera(&self) -> &Camera {
        &self.camera
    }

    /// Camera pixel of the unperturbed first-order spot.
    pub fn detect_px(&self) -> (usize, usize) {
        self.detect_px
    }

    pub fn reference_amp(&self) -> Complex64 {
        self.reference_amp
    }

    /// First-order amplitude at `detect_px` of the unperturbed plain prism.
    pub fn unperturbed_amplitude(&self) -> Complex64 {
        self.unperturbed_amp
    }

    /// Peak camera intensity of the unperturbed plain prism, per ms.
    pub fn unperturbed_peak(&self) -> f64 {
        self.unperturbed_peak
    }

    pub fn detector(&self) -> &DetectorModel {
        &self.detector
    }

    pub fn photo_detector(&self) -> &DetectorModel {
        &self.photo
    }

    /// Super-pixel edge length for a basis of size `n`.
    pub fn cell_px(&self, n: usize) -> Result<usize> {
        if !is_power_of_four(n) {
            return Err(Error::NotPowerOfFour(n));
        }
        let grid_side = 1usize << (n.trailing_zeros() / 2);
        if !self.config.side_px.is_multiple_of(grid_side) {
            return Err(Error::IncompatibleGrid {
                side_px: self.config.side_px,
                grid_side,
            });
        }
        Ok(self.config.side_px / grid_side)
    }

    fn plane(&self, phase: Grid2D<f64>) -> SlmPlane {
        SlmPlane {
            side_px: self.config.side_px,
            phase,
            amplitude: self.amplitude.clone(),
            levels: self.config.phase_levels,
        }
    }

    pub fn plain_prism(&self) -> SlmPlane {
        let p = self.prism;
        self.plane(Grid2D::from_fn(self.config.side_px, |r, c| p.phase_at(r, c)))
    }

    /// Prism inside super-pixel `element` only; flat elsewhere.
    pub fn encode_canonical(&self, element: usize, n: usize) -> Result<SlmPlane> {
        let cell = self.cell_px(n)?;
        if element >= n {
            return Err(Error::ElementOutOfRange { index: element, n });
        }
        let grid_side = self.config.side_px / cell;
        let (er, ec) = (element / grid_side, element % grid_side);
        let p = self.prism;
        Ok(self.plane(Grid2D::from_fn(self.config.side_px, |r, c| {
            if r / cell == er && c / cell == ec {
                p.phase_at(r, c)
            } else {
                0.0
            }
        })))
    }

    /// Full-aperture prism with `π` added on super-pixels where `row` is −1.
    pub fn encode_hadamard(&self, row: &[i8], n: usize) -> Result<SlmPlane> {
        let cell = self.cell_px(n)?;
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: row.len(),
            });
        }
        let grid_side = self.config.side_px / cell;
        let p = self.prism;
        Ok(self.plane(Grid2D::from_fn(self.config.side_px, |r, c| {
            let phi = p.phase_at(r, c);
            if row[(r / cell) * grid_side + c / cell] < 0 {
                wrap_phase(phi + PI)
            } else {
                phi
            }
        })))
    }

    /// Prism plus a constant phase per super-pixel.
    pub fn encode_correction(&self, phase_grid: &Grid2D<f64>) -> Result<SlmPlane> {
        let grid_side = phase_grid.side();
        let n = grid_side * grid_side;
        let cell = self.cell_px(n).map_err(|e| match e {
            Error::NotPowerOfFour(_) => Error::DimensionMismatch {
                expected: self.config.side_px,
                actual: grid_side,
            },
            other => other,
        })?;
        let p = self.prism;
        Ok(self.plane(Grid2D::from_fn(self.config.side_px, |r, c| {
            wrap_phase(p.phase_at(r, c) + *phase_grid.get(r / cell, c / cell))
        })))
    }

    /// SLM field including the perturbation screen.
    pub fn render(&self, slm: &SlmPlane, delta: f64) -> Result<Grid2D<Complex64>> {
        slm.field(&self.screen, delta)
    }

    /// Complex image on the camera window.
    pub fn focal_image(&self, slm: &SlmPlane) -> Result<Grid2D<Complex64>> {
        self.camera.image(&self.render(slm, 0.0)?)
    }

    /// Complex amplitude of the modulated beam at the detection pixel.
    pub fn focal_amplitude(&self, slm: &SlmPlane, delta: f64) -> Result<Complex64> {
        self.camera.amplitude_at(&self.render(slm, delta)?, self.detect_px)
    }

    /// Spot photograph with the photo detector (no reference beam).
    pub fn photograph(&self, slm: &SlmPlane, exposure_ms: f64, stream: u64) -> Result<Grid2D<f64>> {
        let image = self.focal_image(slm)?;
        super::detector::detect(&image, &self.photo, exposure_ms, stream)
    }

    /// Per-super-pixel contributions to the detection-pixel amplitude for
    /// each phase shift and each of the three states a cell can display:
    /// prism, prism + π, and flat.
    ///
    /// Every basis pattern is a choice of one state per cell, so its focal
    /// amplitude is a sum of these terms.
    pub fn cell_responses(&self, n: usize) -> Result<CellResponses> {
        let cell = self.cell_px(n)?;
        let side = self.config.side_px;
        let grid_side = side / cell;
        let levels = self.config.phase_levels;
        let kr = self.camera.kernel_row(self.detect_px.0);
        let kc = self.camera.kernel_row(self.detect_px.1);
        let zero = || [alloc::vec![Complex64::default(); n], alloc::vec![Complex64::default(); n], alloc::vec![Complex64::default(); n]];
        let (mut prism, mut flipped, mut flat) = (zero(), zero(), zero());
        let cis = |phi: f64| Complex64::from_polar(1.0, super::slm::quantize_phase(phi, levels));
        for r in 0..side {
            for c in 0..side {
                let j = (r / cell) * grid_side + c / cell;
                let w = self.incident[r * side + c] * kr[r] * kc[c];
                let phi = self.prism.phase_at(r, c);
                let phi_flip = wrap_phase(phi + PI);
                for (m, &delta) in PHASE_SHIFTS.iter().enumerate() {
                    prism[m][j] += w * cis(phi + delta);
                    flipped[m][j] += w * cis(phi_flip + delta);
                    flat[m][j] += w * cis(delta);
                }
            }
        }
        Ok(CellResponses {
            n,
            prism,
            flipped,
            flat,
        })
    }

    /// Noiseless per-super-pixel field `x`: the first-order amplitude at the
    /// detection pixel contributed by super-pixel `j` showing the prism while
    /// every other super-pixel is dark. The full-prism amplitude is `Σ x_j`.
    pub fn ground_truth_field(&self, n: usize) -> Result<ComplexField> {
        Ok(ComplexField::new(self.cell_responses(n)?.prism[0].clone()))
    }
}

/// Cell-resolved detection-pixel amplitudes, indexed `[shift][cell]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResponses {
    pub n: usize,
    pub prism: [Vec<Complex64>; 3],
    pub flipped: [Vec<Complex64>; 3],
    pub flat: [Vec<Complex64>; 3],
}

impl CellResponses {
    /// Noiseless modulated-arm amplitudes for every row of `basis`, in the
    /// basis's row order, at phase shift `m`.
    pub fn amplitudes(&self, basis: &BasisMatrix, m: usize) -> Result<Vec<Complex64>> {
        if basis.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: basis.n(),
            });
        }
        match basis.kind() {
            BasisKind::Canonical => {
                let dark: Complex64 = self.flat[m].iter().sum();
                Ok(basis
                    .perm()
                    .iter()
                    .map(|&e| dark - self.flat[m][e] + self.prism[m][e])
                    .collect())
            }
            BasisKind::Hadamard => {
                // A ±1 row picks prism (+1) or flipped (−1) per cell, i.e.
                // common + row·difference.
                let common: Complex64 = self.prism[m]
                    .iter()
                    .zip(&self.flipped[m])
                    .map(|(p, f)| (p + f) * 0.5)
                    .sum();
                let diff: Vec<Complex64> = self.prism[m]
                    .iter()
                    .zip(&self.flipped[m])
                    .map(|(p, f)| (p - f) * 0.5)
                    .collect();
                Ok(basis.apply(&diff)?.into_iter().map(|y| common + y).collect())
            }
        }
    }
}
