//! Experiment orchestration: uncorrected baseline, measurement,
//! reconstruction (full or compressive), correction and SNR scoring over
//! sweeps of basis size, ordering and compression ratio.

mod config;
mod metrics;
mod record;
mod runner;
mod snr;

pub use config::{DetectorSpec, ExperimentConfig, ExposureSchedule, FixedExposure, SigmaPolicy, SolverConfig};
pub use metrics::{circular_variance, ranks, spearman};
pub use record::{RunOutcome, RunRecord, ShiftDiagnostics, SolverDiagnostics, Sweep, CSV_HEADER};
pub use runner::{run_cs_sweep, run_full, Experiment};
pub use snr::{snr, Roi};
