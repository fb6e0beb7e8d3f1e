use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::basis::{BasisKind, Ordering};
use crate::grid::Grid2D;
use crate::interferometry::InterferogramSet;
use crate::solver::{CsReconstruction, SolverStatus};

/// Column names of `results.csv`.
pub const CSV_HEADER: [&str; 12] = [
    "perturbation",
    "n",
    "basis",
    "ordering",
    "cr",
    "seed",
    "exposure_ms",
    "snr",
    "max_corr",
    "mean_uncorr",
    "solver_iters",
    "converged",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftDiagnostics {
    pub iterations: usize,
    pub residual_norm: f64,
    pub tau_final: f64,
    pub status: SolverStatus,
    pub tau_path: Vec<f64>,
    pub residual_path: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub m: usize,
    pub sigma: f64,
    pub shifts: Vec<ShiftDiagnostics>,
}

impl SolverDiagnostics {
    pub fn from_reconstruction(rec: &CsReconstruction, sigma: f64) -> Self {
        Self {
            m: rec.m,
            sigma,
            shifts: rec
                .solves
                .iter()
                .map(|s| ShiftDiagnostics {
                    iterations: s.iterations,
                    residual_norm: s.residual_norm,
                    tau_final: s.tau_final,
                    status: s.status,
                    tau_path: s.tau_path.clone(),
                    residual_path: s.residual_path.clone(),
                })
                .collect(),
        }
    }
}

/// One experiment outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub perturbation: String,
    pub n: usize,
    pub basis: BasisKind,
    /// `None` for the canonical basis, which has no ordering.
    pub ordering: Option<Ordering>,
    pub cr: f64,
    /// Seed of the interferogram detector noise.
    pub seed: u64,
    pub exposure_ms: f64,
    pub spot_exposure_ms: f64,
    /// `max_corrected / mean_uncorrected`.
    pub snr: f64,
    pub max_corrected: f64,
    pub mean_uncorrected: f64,
    pub saturated_fraction: f64,
    pub solver_iters: usize,
    pub converged: bool,
    pub solver: Option<SolverDiagnostics>,
    pub error: Option<String>,
    /// Image files written for this run, relative to the output directory.
    pub images: Vec<String>,
}

impl RunRecord {
    pub fn ordering_label(&self) -> String {
        self.ordering.map_or_else(|| "none".to_string(), |o| o.to_string())
    }

    /// Stable file-name stem identifying the run.
    pub fn stem(&self) -> String {
        let ordering = self.ordering_label().replace(':', "-");
        if self.solver.is_some() {
            alloc::format!("{}_n{}_{}_{}_cr{}", self.perturbation, self.n, self.basis, ordering, self.cr)
        } else {
            alloc::format!("{}_n{}_{}_{}", self.perturbation, self.n, self.basis, ordering)
        }
    }

    /// Fields in [`CSV_HEADER`] order.
    pub fn csv_fields(&self) -> [String; 12] {
        [
            self.perturbation.clone(),
            self.n.to_string(),
            self.basis.to_string(),
            self.ordering_label(),
            self.cr.to_string(),
            self.seed.to_string(),
            self.exposure_ms.to_string(),
            self.snr.to_string(),
            self.max_corrected.to_string(),
            self.mean_uncorrected.to_string(),
            self.solver_iters.to_string(),
            self.converged.to_string(),
        ]
    }
}

/// A run together with the images it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub corrected: Option<Grid2D<f64>>,
    /// Projected correction, per super-pixel, in `[0, 2π)`.
    pub phase: Option<Grid2D<f64>>,
}

/// Everything a sweep produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sweep {
    pub runs: Vec<RunOutcome>,
    /// Uncorrected spot photographs, one per `n`.
    pub baselines: Vec<(usize, Grid2D<f64>)>,
    pub interferograms: Vec<InterferogramSet>,
}

impl Sweep {
    pub fn records(&self) -> Vec<RunRecord> {
        self.runs.iter().map(|r| r.record.clone()).collect()
    }

    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(|r| r.record.converged)
    }
}
