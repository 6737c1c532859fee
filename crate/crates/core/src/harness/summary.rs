//! Campaign summaries, stored as `summary.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::optimize::{Algorithm, RunResult, RunStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub best_objective: f64,
    pub best_x: Vec<f64>,
    pub evaluations: usize,
    pub total_time_ms: f64,
    /// Wall time excluding objective evaluations.
    pub compute_time_ms: f64,
    pub eval_time_ms: f64,
    pub gp_count: usize,
    pub status: RunStatus,
    /// Trace file name, relative to the summary.
    pub trace: String,
}

impl RunSummary {
    pub fn from_result(result: &RunResult, run: usize, seed: u64, trace: String) -> Self {
        Self {
            algorithm: result.algorithm,
            run,
            seed,
            best_objective: result.incumbent.y,
            best_x: result.incumbent.x.clone(),
            evaluations: result.evaluations(),
            total_time_ms: result.total_time_ms,
            compute_time_ms: result.compute_time_ms(),
            eval_time_ms: result.eval_time_ms(),
            gp_count: result.gp_count,
            status: result.status.clone(),
            trace,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmAggregate {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_best_objective: f64,
    pub mean_total_time_ms: f64,
    pub mean_compute_time_ms: f64,
    pub mean_gp_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSummary {
    pub objective: String,
    pub dimension: usize,
    pub runs: Vec<RunSummary>,
    pub aggregates: Vec<AlgorithmAggregate>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Per-algorithm means over `runs`, ordered by algorithm.
pub fn aggregate(runs: &[RunSummary]) -> Vec<AlgorithmAggregate> {
    let mut algs: Vec<Algorithm> = runs.iter().map(|r| r.algorithm).collect();
    algs.sort();
    algs.dedup();
    algs.into_iter()
        .map(|a| {
            let sel = || runs.iter().filter(move |r| r.algorithm == a);
            AlgorithmAggregate {
                algorithm: a,
                runs: sel().count(),
                mean_best_objective: mean(sel().map(|r| r.best_objective)),
                mean_total_time_ms: mean(sel().map(|r| r.total_time_ms)),
                mean_compute_time_ms: mean(sel().map(|r| r.compute_time_ms)),
                mean_gp_count: mean(sel().map(|r| r.gp_count as f64)),
            }
        })
        .collect()
}

impl CampaignSummary {
    pub fn new(objective: String, dimension: usize, runs: Vec<RunSummary>) -> Self {
        let aggregates = aggregate(&runs);
        Self {
            objective,
            dimension,
            runs,
            aggregates,
        }
    }

    pub fn any_aborted(&self) -> bool {
        self.runs.iter().any(|r| r.status != RunStatus::Completed)
    }

    pub fn aggregate_for(&self, a: Algorithm) -> Option<&AlgorithmAggregate> {
        self.aggregates.iter().find(|g| g.algorithm == a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::parse(origin, e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| HarnessError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text, path)
    }
}
