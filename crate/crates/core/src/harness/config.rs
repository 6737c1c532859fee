//! Campaign configuration files.
//!
//! ```toml
//! [objective]
//! name = "styblinski_tang"
//! dimension = 10
//!
//! [campaign]
//! algorithms = ["bo", "dsa"]
//! runs = 4
//! output_dir = "results"
//!
//! [run]
//! max_iter = 500
//! subset_size = 2
//!
//! [run.direct]
//! max_evals = 2000
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::objectives::{self, ObjectiveSpec};
use crate::optimize::{Algorithm, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveConfig {
    /// A benchmark name or `lotka_volterra`.
    pub name: String,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    /// Seed for synthetic measurement noise (`lotka_volterra` only).
    #[serde(default)]
    pub data_seed: u64,
    #[serde(default)]
    pub noise_std: f64,
}

fn default_dimension() -> usize {
    10
}

impl ObjectiveConfig {
    pub fn resolve(&self) -> Result<ObjectiveSpec, HarnessError> {
        if !(self.noise_std >= 0.0) {
            return Err(HarnessError::Config(format!(
                "objective.noise_std must be >= 0, got {}",
                self.noise_std
            )));
        }
        objectives::resolve(&self.name, self.dimension, self.data_seed, self.noise_std)
            .map_err(|e| HarnessError::Config(format!("objective: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Write measured timings into traces; with `false` the timing columns
    /// are zero and reruns produce byte-identical files.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Bo, Algorithm::Dsa]
}
fn default_runs() -> usize {
    4
}
fn default_workers() -> usize {
    4
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}
fn default_true() -> bool {
    true
}

impl Default for CampaignSection {
    fn default() -> Self {
        Self {
            algorithms: default_algorithms(),
            runs: default_runs(),
            workers: default_workers(),
            output_dir: default_output_dir(),
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub objective: ObjectiveConfig,
    #[serde(default)]
    pub campaign: CampaignSection,
    /// `run.seed` is the base seed; run `r` uses `seed + r`.
    #[serde(default)]
    pub run: RunConfig,
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let cfg: CampaignConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.campaign.runs == 0 {
            return Err(HarnessError::Config("campaign.runs must be >= 1".into()));
        }
        if self.campaign.algorithms.is_empty() {
            return Err(HarnessError::Config(
                "campaign.algorithms must name at least one algorithm".into(),
            ));
        }
        if self.campaign.workers == 0 {
            return Err(HarnessError::Config("campaign.workers must be >= 1".into()));
        }
        let spec = self.objective.resolve()?;
        let needs_subset = self.campaign.algorithms.iter().any(|a| *a != Algorithm::Bo);
        let check = if needs_subset {
            self.run.validate(spec.dim)
        } else {
            self.run.validate_common(spec.dim)
        };
        check.map_err(|e| HarnessError::Config(format!("run: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
