//! Three-step phase-shifting measurement of basis elements and recovery of
//! the complex field.
//!
//! With the shift applied as `e^{+iδ}` on the modulated arm, the three-step
//! combination returns `2|r||y|e^{-iΔφ}` where `Δφ = arg y − arg r`. Adding
//! `+arg x̂` to each super-pixel therefore brings all contributions into
//! phase; [`CORRECTION_SIGN`] records that choice and
//! [`check_sign_convention`] verifies it on a small bench.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // only needed without std
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::basis::{reshape_2d, BasisKind, BasisMatrix, Ordering};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid2D;
use crate::optics::{wrap_phase, BenchConfig, BenchState, CellResponses, DetectorModel, Exposure, Perturbation};

/// Phase shifts `δ_m` applied to the modulated arm.
pub const PHASE_SHIFTS: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];

/// Sign applied to `arg x̂` when projecting the correction.
pub const CORRECTION_SIGN: f64 = 1.0;

/// Per-super-pixel complex field, defined up to a global complex factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexField {
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn phases(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.arg()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Gauge-invariant similarity `|⟨a, b⟩| / (‖a‖‖b‖)`; zero if either
    /// field vanishes.
    pub fn correlation(&self, other: &ComplexField) -> Result<f64> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: other.n(),
            });
        }
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return Ok(0.0);
        }
        let inner: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(inner.norm() / denom)
    }
}

/// Ideal interference of the reference `r` with a modulated amplitude `y`
/// shifted by `δ`: `|r + e^{iδ} y|²`.
pub fn fringe_intensity(reference: Complex64, y: Complex64, delta: f64) -> f64 {
    (reference + Complex64::from_polar(1.0, delta) * y).norm_sqr()
}

/// The `3n` intensities `I_{i,m}`, stored as three vectors `I_m` indexed by
/// measurement position in the recording basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferogramSet {
    pub n: usize,
    pub kind: BasisKind,
    pub ordering: Ordering,
    /// Natural row measured at each position.
    pub perm: Vec<usize>,
    pub values: [Vec<f64>; 3],
    pub exposure_ms: f64,
    pub saturated_fraction: f64,
    pub seed: u64,
}

impl InterferogramSet {
    pub fn new(basis: &BasisMatrix, values: [Vec<f64>; 3], exposure_ms: f64, seed: u64) -> Result<Self> {
        for v in &values {
            if v.len() != basis.n() {
                return Err(Error::DimensionMismatch {
                    expected: basis.n(),
                    actual: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(invalid("interferogram intensities must be finite and non-negative"));
            }
        }
        Ok(Self {
            n: basis.n(),
            kind: basis.kind(),
            ordering: basis.ordering(),
            perm: basis.perm().to_vec(),
            values,
            exposure_ms,
            saturated_fraction: 0.0,
            seed,
        })
    }

    pub fn shift(&self, m: usize) -> &[f64] {
        &self.values[m]
    }

    fn describe(kind: BasisKind, ordering: Ordering) -> alloc::string::String {
        match kind {
            BasisKind::Canonical => "canonical".to_string(),
            BasisKind::Hadamard => alloc::format!("hadamard/{ordering}"),
        }
    }

    /// Fails unless these measurements were recorded row-for-row in `basis`.
    pub fn check_matches(&self, basis: &BasisMatrix) -> Result<()> {
        if basis.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: basis.n(),
            });
        }
        if basis.kind() != self.kind || basis.perm() != self.perm.as_slice() {
            return Err(Error::OrderingMismatch {
                recorded: Self::describe(self.kind, self.ordering),
                requested: Self::describe(basis.kind(), basis.ordering()),
            });
        }
        Ok(())
    }

    /// The same measurements listed in `target`'s row order.
    pub fn reordered(&self, target: &BasisMatrix) -> Result<Self> {
        if target.n() != self.n || target.kind() != self.kind {
            return Err(Error::OrderingMismatch {
                recorded: Self::describe(self.kind, self.ordering),
                requested: Self::describe(target.kind(), target.ordering()),
            });
        }
        let mut position = alloc::vec![0usize; self.n];
        for (i, &r) in self.perm.iter().enumerate() {
            position[r] = i;
        }
        let pick = |v: &Vec<f64>| target.perm().iter().map(|&r| v[position[r]]).collect::<Vec<f64>>();
        Ok(Self {
            ordering: target.ordering(),
            perm: target.perm().to_vec(),
            values: [pick(&self.values[0]), pick(&self.values[1]), pick(&self.values[2])],
            ..self.clone()
        })
    }

    /// `(element, shift_index, intensity)` triples, element-major.
    pub fn records(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (0..3).map(move |m| (i, m, self.values[m][i])))
    }

    /// Inverse of [`Self::records`]; every `(element, shift)` pair must
    /// appear exactly once.
    pub fn from_records(
        basis: &BasisMatrix,
        records: impl IntoIterator<Item = (usize, usize, f64)>,
        exposure_ms: f64,
        seed: u64,
    ) -> Result<Self> {
        let n = basis.n();
        let mut values = [alloc::vec![f64::NAN; n], alloc::vec![f64::NAN; n], alloc::vec![f64::NAN; n]];
        let mut count = 0;
        for (i, m, v) in records {
            if i >= n {
                return Err(Error::ElementOutOfRange { index: i, n });
            }
            if m >= 3 {
                return Err(invalid("shift index must be 0, 1 or 2"));
            }
            if !values[m][i].is_nan() {
                return Err(invalid(alloc::format!("duplicate record for element {i}, shift {m}")));
            }
            values[m][i] = v;
            count += 1;
        }
        if count != 3 * n {
            return Err(Error::DimensionMismatch {
                expected: 3 * n,
                actual: count,
            });
        }
        Self::new(basis, values, exposure_ms, seed)
    }
}

/// Noiseless modulated-arm amplitudes `y_i(δ_m)` for every row of `basis`.
pub fn modulated_amplitudes(responses: &CellResponses, basis: &BasisMatrix) -> Result<[Vec<Complex64>; 3]> {
    Ok([
        responses.amplitudes(basis, 0)?,
        responses.amplitudes(basis, 1)?,
        responses.amplitudes(basis, 2)?,
    ])
}

/// Detects `|r + y_i(δ_m)|²` for precomputed modulated amplitudes.
///
/// Each reading draws from its own random stream keyed by the natural row
/// index and shift, so the result does not depend on measurement order.
pub fn record(
    reference: Complex64,
    amplitudes: &[Vec<Complex64>; 3],
    basis: &BasisMatrix,
    detector: &DetectorModel,
    exposure: Exposure,
) -> Result<InterferogramSet> {
    let n = basis.n();
    let noiseless: [Vec<f64>; 3] = core::array::from_fn(|m| amplitudes[m].iter().map(|y| (reference + y).norm_sqr()).collect());
    for v in &noiseless {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    let brightest = noiseless.iter().flatten().copied().fold(0.0, f64::max);
    let exposure_ms = exposure.resolve(detector, brightest)?;
    DetectorModel { exposure_ms, ..*detector }.validate()?;
    let mut saturated = 0usize;
    let mut values: [Vec<f64>; 3] = Default::default();
    for (m, out) in values.iter_mut().enumerate() {
        *out = noiseless[m]
            .iter()
            .zip(basis.perm())
            .map(|(&intensity, &row)| {
                let mut rng = detector.rng((row * 3 + m) as u64);
                let (v, sat) = detector.sample(intensity, exposure_ms, &mut rng);
                saturated += usize::from(sat);
                v
            })
            .collect();
    }
    let mut set = InterferogramSet::new(basis, values, exposure_ms, detector.rng_seed)?;
    set.saturated_fraction = saturated as f64 / (3 * n) as f64;
    Ok(set)
}

/// Measures all `3n` interferograms of `basis` on `bench` with its own
/// detector.
pub fn measure(bench: &BenchState, basis: &BasisMatrix, exposure: Exposure) -> Result<InterferogramSet> {
    measure_with(bench, bench.detector(), basis, exposure)
}

pub fn measure_with(
    bench: &BenchState,
    detector: &DetectorModel,
    basis: &BasisMatrix,
    exposure: Exposure,
) -> Result<InterferogramSet> {
    let responses = bench.cell_responses(basis.n())?;
    let y = modulated_amplitudes(&responses, basis)?;
    record(bench.reference_amp(), &y, basis, detector, exposure)
}

/// Three-step combination
/// `x = −(x₂ + x₃ − 2x₁)/3 + i(x₂ − x₃)/√3`.
pub fn combine_three_step(x1: &[f64], x2: &[f64], x3: &[f64]) -> Result<ComplexField> {
    for len in [x2.len(), x3.len()] {
        if len != x1.len() {
            return Err(Error::DimensionMismatch {
                expected: x1.len(),
                actual: len,
            });
        }
    }
    let s3 = 3.0.sqrt();
    Ok(ComplexField::new(
        x1.iter()
            .zip(x2)
            .zip(x3)
            .map(|((&a, &b), &c)| Complex64::new(-(b + c - 2.0 * a) / 3.0, (b - c) / s3))
            .collect(),
    ))
}

/// Solves the basis system for each shift, then combines the three results.
pub fn reconstruct_full(basis: &BasisMatrix, igrams: &InterferogramSet) -> Result<ComplexField> {
    igrams.check_matches(basis)?;
    let x1 = basis.solve(&igrams.values[0])?;
    let x2 = basis.solve(&igrams.values[1])?;
    let x3 = basis.solve(&igrams.values[2])?;
    combine_three_step(&x1, &x2, &x3)
}

/// Per-super-pixel phase to add to the prism, as a `√n x √n` grid in
/// `[0, 2π)`.
pub fn correction_phase(field: &ComplexField) -> Result<Grid2D<f64>> {
    let phases: Vec<f64> = field
        .values()
        .iter()
        .map(|z| wrap_phase(CORRECTION_SIGN * z.arg()))
        .collect();
    reshape_2d(&phases)
}

/// Focal intensities at the detection pixel after projecting the correction
/// from a noiseless full measurement with the configured sign and with the
/// opposite sign.
pub fn sign_check(bench: &BenchState, basis: &BasisMatrix) -> Result<(f64, f64)> {
    let ideal = DetectorModel::ideal(1.0);
    let igrams = measure_with(bench, &ideal, basis, Exposure::Fixed(1.0))?;
    let field = reconstruct_full(basis, &igrams)?;
    let flipped = ComplexField::new(field.values().iter().map(|z| z.conj()).collect());
    let score = |f: &ComplexField| -> Result<f64> {
        let slm = bench.encode_correction(&correction_phase(f)?)?;
        Ok(bench.focal_amplitude(&slm, 0.0)?.norm_sqr())
    };
    Ok((score(&field)?, score(&flipped)?))
}

/// Startup self-check of the phase-shift sign convention on a 64 px bench
/// with a glass edge of step π/2, n = 16. (A step of π is its own conjugate
/// and cannot tell the signs apart.)
pub fn check_sign_convention() -> Result<()> {
    let config = BenchConfig {
        side_px: 64,
        camera_window_px: 16,
        ..BenchConfig::default()
    };
    let glass = Perturbation::GlassSlide {
        edge_angle: PI / 6.0,
        phase_step: PI / 2.0,
        edge_offset: 0.0,
    };
    let bench = BenchState::new(&config, glass)?;
    let basis = BasisMatrix::hadamard(16, Ordering::Natural)?;
    let (configured, opposite) = sign_check(&bench, &basis)?;
    if configured > opposite {
        Ok(())
    } else {
        Err(Error::SignConvention { configured, opposite })
    }
}
