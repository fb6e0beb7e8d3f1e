use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use insitu_core::basis::BasisMatrix;
use insitu_core::experiment::{Experiment, RunRecord, Sweep};
use serde::Serialize;

use crate::config::to_toml;
use crate::formats::{
    interferogram_stem, intensity_to_gray16, phase_to_gray, write_interferograms, write_json, write_pgm16,
    write_pgm8, write_permutation, write_results, InterferogramMeta,
};

const PARTIAL_MARKER: &str = ".partial";

/// Marks `out` as incomplete until dropped via [`Partial::done`].
struct Partial<'a>(&'a Path);

impl<'a> Partial<'a> {
    fn begin(out: &'a Path) -> Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        fs::write(out.join(PARTIAL_MARKER), b"incomplete\n")?;
        Ok(Self(out))
    }

    fn done(self) -> Result<()> {
        fs::remove_file(self.0.join(PARTIAL_MARKER))?;
        Ok(())
    }
}

/// Writes everything a sweep produced under `out` and returns the records
/// with their image paths filled in.
///
/// Layout: `results.csv`, `config.toml`, `runs/*.json`, `images/*.pgm`,
/// `interferograms/*.{csv,json}`, `permutations/*.csv`.
pub fn emit(experiment: &Experiment, sweep: &Sweep, out: &Path) -> Result<Vec<RunRecord>> {
    let partial = Partial::begin(out)?;
    let config = experiment.config();
    let perturbation = config.perturbation.label();
    let photo_fs = experiment.bench().photo_detector().full_scale;

    let mut records = Vec::with_capacity(sweep.runs.len());
    for run in &sweep.runs {
        let mut record = run.record.clone();
        let stem = record.stem();
        if let Some(img) = &run.corrected {
            let rel = format!("images/{stem}_corrected.pgm");
            write_pgm16(&out.join(&rel), &intensity_to_gray16(img, photo_fs))?;
            record.images.push(rel);
        }
        if let Some(phase) = &run.phase {
            let rel = format!("images/{stem}_phase.pgm");
            write_pgm8(&out.join(&rel), &phase_to_gray(phase))?;
            record.images.push(rel);
        }
        write_json(&out.join(format!("runs/{stem}.json")), &record)?;
        records.push(record);
    }

    for (n, img) in &sweep.baselines {
        let path = out.join(format!("images/{perturbation}_n{n}_uncorrected.pgm"));
        write_pgm16(&path, &intensity_to_gray16(img, photo_fs))?;
    }

    for set in &sweep.interferograms {
        let stem = interferogram_stem(perturbation, set);
        let meta = InterferogramMeta {
            perturbation: perturbation.to_string(),
            n: set.n,
            basis: set.kind,
            ordering: set.ordering,
            exposure_ms: set.exposure_ms,
            saturated_fraction: set.saturated_fraction,
            seed: set.seed,
            master_seed: config.master_seed,
        };
        write_interferograms(&out.join(format!("interferograms/{stem}.csv")), set, &meta)?;
    }

    let mut seen = Vec::new();
    for r in &records {
        if let Some(ordering) = r.ordering {
            if !seen.contains(&(r.n, ordering)) {
                seen.push((r.n, ordering));
                let basis = BasisMatrix::hadamard(r.n, ordering)?;
                let name = ordering.to_string().replace(':', "-");
                write_permutation(&out.join(format!("permutations/hadamard_n{}_{name}.csv", r.n)), &basis)?;
            }
        }
    }

    write_results(&out.join("results.csv"), &records)?;
    fs::write(out.join("config.toml"), to_toml(config)?)?;
    partial.done()?;
    Ok(records)
}

#[derive(Serialize)]
struct BenchSidecar<'a> {
    perturbation: &'a insitu_core::optics::Perturbation,
    side_px: usize,
    detect_px: (usize, usize),
    unperturbed_peak: f64,
    spot_exposure_ms: f64,
    photo_full_scale: f64,
    uncorrected_roi_max: f64,
    uncorrected_roi_mean: f64,
}

/// Perturbation screen, its JSON description and the uncorrected spot.
pub fn emit_bench(experiment: &Experiment, out: &Path) -> Result<()> {
    let partial = Partial::begin(out)?;
    let bench = experiment.bench();
    let label = experiment.config().perturbation.label();
    write_pgm8(&out.join(format!("images/{label}_screen.pgm")), &phase_to_gray(bench.screen()))?;
    let n = experiment.config().n_list[0];
    let spot = experiment.baseline(n)?;
    let photo_fs = bench.photo_detector().full_scale;
    write_pgm16(
        &out.join(format!("images/{label}_n{n}_uncorrected.pgm")),
        &intensity_to_gray16(&spot, photo_fs),
    )?;
    let roi = experiment.roi();
    write_json(
        &out.join(format!("{label}_bench.json")),
        &BenchSidecar {
            perturbation: &experiment.config().perturbation,
            side_px: bench.side_px(),
            detect_px: bench.detect_px(),
            unperturbed_peak: bench.unperturbed_peak(),
            spot_exposure_ms: experiment.spot_exposure_ms(),
            photo_full_scale: photo_fs,
            uncorrected_roi_max: roi.max(&spot)?,
            uncorrected_roi_mean: roi.mean(&spot)?,
        },
    )?;
    partial.done()
}
