use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use insitu_core::basis::{BasisKind, Ordering};
use insitu_core::experiment::ExperimentConfig;
use insitu_core::optics::Perturbation;

/// Screen seed used when `--perturbation scatterer` replaces another kind.
pub const SCATTERER_SEED: u64 = 7;

/// Reads a TOML experiment description. Missing keys take their defaults.
pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing config {}", path.display()))
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    Ok(toml::from_str(text)?)
}

pub fn to_toml(config: &ExperimentConfig) -> Result<String> {
    Ok(toml::to_string(config)?)
}

/// Command-line values that replace configuration entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<Vec<usize>>,
    pub basis: Option<Vec<BasisKind>>,
    pub ordering: Option<Vec<Ordering>>,
    pub cr: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub perturbation: Option<String>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) -> Result<()> {
        if let Some(n) = &self.n {
            config.n_list = n.clone();
        }
        if let Some(b) = &self.basis {
            config.bases = b.clone();
        }
        if let Some(o) = &self.ordering {
            config.orderings = o.clone();
        }
        if let Some(cr) = &self.cr {
            config.cr_grid = cr.clone();
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(p) = &self.perturbation {
            config.perturbation = match (p.as_str(), config.perturbation) {
                ("glass", Perturbation::GlassSlide { .. }) => config.perturbation,
                ("glass", _) => Perturbation::glass(),
                ("scatterer", Perturbation::RandomScreen { .. }) => config.perturbation,
                ("scatterer", _) => Perturbation::scatterer(SCATTERER_SEED),
                ("none", _) => Perturbation::None,
                (other, _) => bail!("unknown perturbation `{other}` (expected glass|scatterer|none)"),
            };
        }
        if let Some(out) = &self.out {
            config.output_dir = out.display().to_string();
        }
        Ok(())
    }
}
