use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)] // only needed without std
use num_traits::Float;

use super::config::{ExperimentConfig, SigmaPolicy};
use super::record::{RunOutcome, RunRecord, SolverDiagnostics, Sweep};
use super::snr::{snr, Roi};
use crate::basis::{BasisKind, BasisMatrix, Ordering};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid2D;
use crate::interferometry::{
    correction_phase, modulated_amplitudes, reconstruct_full, record, ComplexField, InterferogramSet,
};
use crate::optics::{detect, BenchState, CellResponses, SlmPlane};
use crate::seed::{derive, label};
use crate::solver::{cs_reconstruct, measurement_count};

/// A configured bench plus the sweep logic that runs on it.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    bench: BenchState,
    roi: Roi,
    spot_ms: f64,
}

struct Prepared {
    baseline: Grid2D<f64>,
    mean_uncorrected: f64,
    responses: CellResponses,
}

impl Experiment {
    /// Validates the configuration, builds the bench and calibrates both
    /// detectors against the unperturbed first-order peak.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let bench = BenchState::new(&config.bench, config.perturbation)?;
        let peak = bench.unperturbed_peak();
        let spot_ms = config.exposures.spot(config.perturbation.label());
        let detector = config.detector.model(peak, 1.0, 0)?;
        let photo = config.photo.model(peak * spot_ms, spot_ms, 0)?;
        let bench = bench.with_detector(detector)?.with_photo_detector(photo)?;
        let roi = Roi::centered(bench.detect_px(), config.roi_px, bench.camera().window_px())?;
        Ok(Self {
            config,
            bench,
            roi,
            spot_ms,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn bench(&self) -> &BenchState {
        &self.bench
    }

    pub fn roi(&self) -> &Roi {
        &self.roi
    }

    pub fn spot_exposure_ms(&self) -> f64 {
        self.spot_ms
    }

    fn perturbation(&self) -> &'static str {
        self.config.perturbation.label()
    }

    fn seed(&self, parts: &[u64]) -> u64 {
        derive(self.config.master_seed, parts)
    }

    /// Detector seed for the interferograms of one `(perturbation, n, basis)`.
    pub fn measurement_seed(&self, n: usize, kind: BasisKind) -> u64 {
        self.seed(&[label(self.perturbation()), n as u64, label(&kind.to_string())])
    }

    fn photograph(&self, slm: &SlmPlane, seed: u64) -> Result<Grid2D<f64>> {
        let image = self.bench.focal_image(slm)?;
        detect(&image, &self.bench.photo_detector().with_seed(seed), self.spot_ms, 0)
    }

    /// Uncorrected spot: the plain prism through the perturbation.
    pub fn baseline(&self, n: usize) -> Result<Grid2D<f64>> {
        let seed = self.seed(&[label(self.perturbation()), n as u64, label("uncorrected")]);
        self.photograph(&self.bench.plain_prism(), seed)
    }

    /// All `3n` interferograms of `basis`, with the scheduled exposure.
    pub fn measure(&self, responses: &CellResponses, basis: &BasisMatrix) -> Result<InterferogramSet> {
        let y = modulated_amplitudes(responses, basis)?;
        let detector = self
            .bench
            .detector()
            .with_seed(self.measurement_seed(basis.n(), basis.kind()));
        let exposure = self.config.exposures.interferometric(basis.kind(), self.perturbation());
        record(self.bench.reference_amp(), &y, basis, &detector, exposure)
    }

    /// Projects the correction for `field` and photographs the result.
    pub fn correct(&self, field: &ComplexField, seed: u64) -> Result<(Grid2D<f64>, Grid2D<f64>)> {
        let phase = correction_phase(field)?;
        let photo = self.photograph(&self.bench.encode_correction(&phase)?, seed)?;
        Ok((phase, photo))
    }

    /// Residual tolerance for the first `m` measurements of `igrams`.
    pub fn sigma_for(&self, igrams: &InterferogramSet, m: usize) -> f64 {
        match self.config.solver.sigma {
            SigmaPolicy::Zero => 0.0,
            SigmaPolicy::Fixed(s) => s,
            SigmaPolicy::NoiseFloor => {
                let d = self.bench.detector();
                let var: f64 = igrams
                    .values
                    .iter()
                    .flat_map(|v| v[..m].iter())
                    .map(|&b| {
                        let s = d.noise_sigma(b);
                        s * s
                    })
                    .sum();
                (var / 3.0).sqrt()
            }
        }
    }

    fn prepare(&self, n: usize) -> Result<Prepared> {
        let baseline = self.baseline(n)?;
        let mean_uncorrected = self.roi.mean(&baseline)?;
        if !(mean_uncorrected > 0.0) {
            return Err(Error::DegenerateBaseline);
        }
        Ok(Prepared {
            baseline,
            mean_uncorrected,
            responses: self.bench.cell_responses(n)?,
        })
    }

    fn blank(&self, n: usize, kind: BasisKind, ordering: Option<Ordering>, cr: f64) -> RunRecord {
        RunRecord {
            perturbation: self.perturbation().to_string(),
            n,
            basis: kind,
            ordering,
            cr,
            seed: self.measurement_seed(n, kind),
            exposure_ms: f64::NAN,
            spot_exposure_ms: self.spot_ms,
            snr: f64::NAN,
            max_corrected: f64::NAN,
            mean_uncorrected: f64::NAN,
            saturated_fraction: f64::NAN,
            solver_iters: 0,
            converged: false,
            solver: None,
            error: None,
            images: Vec::new(),
        }
    }

    fn failed(mut record: RunRecord, err: &Error) -> RunOutcome {
        record.error = Some(err.to_string());
        record.converged = false;
        RunOutcome {
            record,
            corrected: None,
            phase: None,
        }
    }

    fn finish(
        &self,
        mut record: RunRecord,
        prep: &Prepared,
        igrams: &InterferogramSet,
        field: &ComplexField,
    ) -> Result<RunOutcome> {
        let seed = self.seed(&[
            label(self.perturbation()),
            record.n as u64,
            label(&record.basis.to_string()),
            label(&record.ordering_label()),
            record.cr.to_bits(),
            label("corrected"),
        ]);
        let (phase, corrected) = self.correct(field, seed)?;
        record.exposure_ms = igrams.exposure_ms;
        record.saturated_fraction = igrams.saturated_fraction;
        record.mean_uncorrected = prep.mean_uncorrected;
        record.max_corrected = self.roi.max(&corrected)?;
        record.snr = snr(&corrected, &prep.baseline, &self.roi)?;
        Ok(RunOutcome {
            record,
            corrected: Some(corrected),
            phase: Some(phase),
        })
    }

    fn full_run(&self, prep: &Prepared, basis: &BasisMatrix, record: RunRecord) -> Result<(RunOutcome, InterferogramSet)> {
        let igrams = self.measure(&prep.responses, basis)?;
        let field = reconstruct_full(basis, &igrams)?;
        let mut out = self.finish(record, prep, &igrams, &field)?;
        out.record.converged = true;
        Ok((out, igrams))
    }

    fn cs_run(
        &self,
        prep: &Prepared,
        igrams: &InterferogramSet,
        ordering: Ordering,
        cr: f64,
        record: RunRecord,
    ) -> Result<RunOutcome> {
        let basis = BasisMatrix::hadamard(igrams.n, ordering)?;
        let set = igrams.reordered(&basis)?;
        let m = measurement_count(cr, igrams.n)?;
        let sigma = self.sigma_for(&set, m);
        let solver = &self.config.solver;
        let rec = cs_reconstruct(&set, &basis, cr, sigma, &solver.options, solver.sparsifier)?;
        let mut out = self.finish(record, prep, &set, &rec.field)?;
        out.record.solver_iters = rec.iterations();
        out.record.converged = rec.converged();
        out.record.solver = Some(SolverDiagnostics::from_reconstruction(&rec, sigma));
        Ok(out)
    }

    /// Reconstructs and scores previously recorded interferograms: a full
    /// reconstruction in their own basis when `cr` is 1 and no other
    /// ordering is requested, a compressive one otherwise.
    pub fn replay(&self, igrams: &InterferogramSet, ordering: Option<Ordering>, cr: f64) -> Result<RunOutcome> {
        let n = igrams.n;
        let recorded = BasisMatrix::new(igrams.kind, n, igrams.ordering)?;
        igrams.check_matches(&recorded)?;
        let prep = self.prepare(n)?;
        let target = ordering.unwrap_or(igrams.ordering);
        let recorded_ordering = (igrams.kind == BasisKind::Hadamard).then_some(igrams.ordering);
        if cr >= 1.0 && target == igrams.ordering {
            let mut record = self.blank(n, igrams.kind, recorded_ordering, 1.0);
            record.seed = igrams.seed;
            let field = reconstruct_full(&recorded, igrams)?;
            let mut out = self.finish(record, &prep, igrams, &field)?;
            out.record.converged = true;
            return Ok(out);
        }
        if igrams.kind != BasisKind::Hadamard {
            return Err(Error::NotHadamard);
        }
        let mut record = self.blank(n, BasisKind::Hadamard, Some(target), cr);
        record.seed = igrams.seed;
        self.cs_run(&prep, igrams, target, cr, record)
    }

    /// Full `3N` measurement and reconstruction for every `(n, basis)`.
    pub fn run_full(&self) -> Result<Sweep> {
        let mut sweep = Sweep::default();
        for &n in &self.config.n_list {
            let prep = self.prepare(n);
            for &kind in &self.config.bases {
                let ordering = (kind == BasisKind::Hadamard).then_some(Ordering::Natural);
                let record = self.blank(n, kind, ordering, 1.0);
                let result = prep.as_ref().map_err(Clone::clone).and_then(|p| {
                    let basis = BasisMatrix::new(kind, n, Ordering::Natural)?;
                    self.full_run(p, &basis, record.clone())
                });
                match result {
                    Ok((out, igrams)) => {
                        sweep.runs.push(out);
                        sweep.interferograms.push(igrams);
                    }
                    Err(e) => sweep.runs.push(Self::failed(record, &e)),
                }
            }
            if let Ok(p) = prep {
                sweep.baselines.push((n, p.baseline));
            }
        }
        Ok(sweep)
    }

    /// Compressive reconstructions for every `(n, ordering, cr)`.
    ///
    /// Each `n` is measured once in natural Hadamard order; the orderings
    /// only reorder those measurements. A full-reconstruction record heads
    /// each `n` as the reference.
    pub fn run_cs_sweep(&self) -> Result<Sweep> {
        if !self.config.bases.contains(&BasisKind::Hadamard) {
            return Err(invalid("the compressive sweep needs the Hadamard basis"));
        }
        let mut sweep = Sweep::default();
        for &n in &self.config.n_list {
            let natural_record = self.blank(n, BasisKind::Hadamard, Some(Ordering::Natural), 1.0);
            let prep = self.prepare(n);
            let measured = prep.as_ref().map_err(Clone::clone).and_then(|p| {
                let natural = BasisMatrix::hadamard(n, Ordering::Natural)?;
                self.full_run(p, &natural, natural_record.clone())
            });
            let igrams = match measured {
                Ok((out, igrams)) => {
                    sweep.runs.push(out);
                    Ok(igrams)
                }
                Err(e) => {
                    sweep.runs.push(Self::failed(natural_record, &e));
                    Err(e)
                }
            };
            for &ordering in &self.config.orderings {
                for &cr in &self.config.cr_grid {
                    let record = self.blank(n, BasisKind::Hadamard, Some(ordering), cr);
                    let result = match (&prep, &igrams) {
                        (Ok(p), Ok(natural_set)) => self.cs_run(p, natural_set, ordering, cr, record.clone()),
                        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                    };
                    sweep
                        .runs
                        .push(result.unwrap_or_else(|e| Self::failed(record, &e)));
                }
            }
            if let Ok(set) = igrams {
                sweep.interferograms.push(set);
            }
            if let Ok(p) = prep {
                sweep.baselines.push((n, p.baseline));
            }
        }
        Ok(sweep)
    }
}

pub fn run_full(config: &ExperimentConfig) -> Result<Sweep> {
    Experiment::new(config.clone())?.run_full()
}

pub fn run_cs_sweep(config: &ExperimentConfig) -> Result<Sweep> {
    Experiment::new(config.clone())?.run_cs_sweep()
}
