use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use insitu::config::{self, Overrides};
use insitu::formats::read_interferograms;
use insitu::{emit, emit_bench};
use insitu_core::basis::{BasisKind, Ordering};
use insitu_core::experiment::{Experiment, ExperimentConfig, Sweep};

/// Simulated in-situ wavefront correction with full and compressive
/// Hadamard measurements.
#[derive(Debug, Parser)]
#[command(name = "insitu", version)]
struct Cli {
    /// TOML experiment configuration; defaults apply without one.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Super-pixel counts, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, global = true, value_delimiter = ',')]
    basis: Option<Vec<BasisKind>>,
    /// natural | walsh | cake | random[:seed]
    #[arg(long, global = true, value_delimiter = ',')]
    ordering: Option<Vec<Ordering>>,
    /// Compression ratios in (0, 1].
    #[arg(long, global = true, value_delimiter = ',')]
    cr: Option<Vec<f64>>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// glass | scatterer | none
    #[arg(long, global = true)]
    perturbation: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render the perturbation and the uncorrected spot.
    Bench,
    /// Full 3N measurement in every configured basis.
    Full,
    /// Compressive sweep over orderings and compression ratios.
    Cs,
    /// Reconstruct from a saved interferogram CSV.
    Replay {
        #[arg(long)]
        interferograms: PathBuf,
    },
}

impl Cli {
    fn experiment_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => config::load(path)?,
            None => ExperimentConfig::default(),
        };
        Overrides {
            n: self.n.clone(),
            basis: self.basis.clone(),
            ordering: self.ordering.clone(),
            cr: self.cr.clone(),
            seed: self.seed,
            perturbation: self.perturbation.clone(),
            out: self.out.clone(),
        }
        .apply(&mut cfg)?;
        Ok(cfg)
    }
}

fn summarize(sweep: &Sweep, out: &std::path::Path) {
    for r in sweep.records() {
        let status = match (&r.error, r.converged) {
            (Some(e), _) => format!("error: {e}"),
            (None, true) => "ok".to_string(),
            (None, false) => "not converged".to_string(),
        };
        println!(
            "{} n={} {} {} cr={} snr={:.2} {status}",
            r.perturbation,
            r.n,
            r.basis,
            r.ordering_label(),
            r.cr,
            r.snr
        );
    }
    println!("wrote {}", out.display());
}

fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = cli.experiment_config()?;
    let out = PathBuf::from(&cfg.output_dir);
    let replay_set = match &cli.command {
        Command::Replay { interferograms } => {
            let (set, meta) = read_interferograms(interferograms)?;
            // the bench must match the one that recorded the data
            cfg.n_list = vec![set.n];
            if cli.seed.is_none() {
                cfg.master_seed = meta.master_seed;
            }
            Some(set)
        }
        _ => None,
    };
    let experiment = Experiment::new(cfg).context("invalid configuration")?;
    let sweep = match &cli.command {
        Command::Bench => {
            emit_bench(&experiment, &out)?;
            println!("wrote {}", out.display());
            return Ok(true);
        }
        Command::Full => experiment.run_full()?,
        Command::Cs => experiment.run_cs_sweep()?,
        Command::Replay { .. } => {
            let set = replay_set.expect("loaded above");
            let ordering = cli.ordering.as_ref().and_then(|o| o.first().copied());
            let cr = cli.cr.as_ref().and_then(|c| c.first().copied()).unwrap_or(1.0);
            let outcome = experiment.replay(&set, ordering, cr)?;
            Sweep {
                runs: vec![outcome],
                ..Sweep::default()
            }
        }
    };
    emit(&experiment, &sweep, &out)?;
    summarize(&sweep, &out);
    Ok(sweep.all_converged())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
