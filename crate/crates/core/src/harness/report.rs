//! Timing tables across campaigns and the subset-size sweep.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::summary::{aggregate, CampaignSummary, RunSummary};
use super::HarnessError;
use crate::objectives::ObjectiveSpec;
use crate::optimize::{run_dsa, Algorithm, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_total_time_ms: f64,
    pub mean_compute_time_ms: f64,
    pub mean_best_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub rows: Vec<TimingRow>,
    /// Mean compute time of each DSA variant divided by that of BO.
    pub ratios: Vec<(Algorithm, f64)>,
}

impl TimingReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<14} {:>5} {:>16} {:>18} {:>16}",
            "algorithm", "runs", "mean total ms", "mean compute ms", "mean best"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<14} {:>5} {:>16.1} {:>18.1} {:>16.6e}",
                r.algorithm.as_str(),
                r.runs,
                r.mean_total_time_ms,
                r.mean_compute_time_ms,
                r.mean_best_objective
            );
        }
        for (a, ratio) in &self.ratios {
            let _ = writeln!(s, "compute time ratio {a}/bo: {ratio:.4}");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("algorithm,runs,mean_total_ms,mean_compute_ms,mean_best_objective\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.algorithm,
                r.runs,
                r.mean_total_time_ms,
                r.mean_compute_time_ms,
                r.mean_best_objective
            );
        }
        s
    }
}

/// Pools the runs of every summary and tabulates per-algorithm means.
pub fn emit_timing_report(summaries: &[CampaignSummary]) -> Result<TimingReport, HarnessError> {
    let runs: Vec<RunSummary> = summaries
        .iter()
        .flat_map(|s| s.runs.iter().cloned())
        .collect();
    if runs.is_empty() {
        return Err(HarnessError::Config(
            "no runs in the given summaries".into(),
        ));
    }
    let rows: Vec<TimingRow> = aggregate(&runs)
        .into_iter()
        .map(|g| TimingRow {
            algorithm: g.algorithm,
            runs: g.runs,
            mean_total_time_ms: g.mean_total_time_ms,
            mean_compute_time_ms: g.mean_compute_time_ms,
            mean_best_objective: g.mean_best_objective,
        })
        .collect();
    let bo = rows.iter().find(|r| r.algorithm == Algorithm::Bo);
    let ratios = match bo {
        Some(bo) => rows
            .iter()
            .filter(|r| r.algorithm != Algorithm::Bo)
            .map(|r| {
                (
                    r.algorithm,
                    r.mean_compute_time_ms / bo.mean_compute_time_ms,
                )
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(TimingReport { rows, ratios })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub subset_size: usize,
    pub runs: usize,
    pub mean_compute_time_ms: f64,
    pub mean_best_objective: f64,
    pub mean_gp_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub objective: String,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("subset-size sweep on {}\n", self.objective);
        let _ = writeln!(
            s,
            "{:>3} {:>5} {:>18} {:>16} {:>10}",
            "k", "runs", "mean compute ms", "mean best", "mean GPs"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>3} {:>5} {:>18.1} {:>16.6e} {:>10.1}",
                r.subset_size,
                r.runs,
                r.mean_compute_time_ms,
                r.mean_best_objective,
                r.mean_gp_count
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("subset_size,runs,mean_compute_ms,mean_best_objective,mean_gp_count\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.subset_size,
                r.runs,
                r.mean_compute_time_ms,
                r.mean_best_objective,
                r.mean_gp_count
            );
        }
        s
    }
}

/// Runs sequential DSA for each subset size in `sizes` and each seed.
pub fn subset_size_sweep(
    objective: &ObjectiveSpec,
    base: &RunConfig,
    sizes: &[usize],
    seeds: &[u64],
) -> Result<SweepReport, HarnessError> {
    if sizes.is_empty() || seeds.is_empty() {
        return Err(HarnessError::Config(
            "sweep needs subset sizes and seeds".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &k in sizes {
        let (mut compute, mut best, mut gps) = (0.0, 0.0, 0.0);
        for &seed in seeds {
            let cfg = RunConfig {
                subset_size: k,
                seed,
                ..base.clone()
            };
            let r = run_dsa(|x: &[f64]| objective.eval(x), &objective.bounds, &cfg)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            if let crate::optimize::RunStatus::Aborted { reason } = &r.status {
                return Err(HarnessError::Runtime(reason.clone()));
            }
            log::info!(
                "sweep k={k} seed={seed}: best {:.6e}, compute {:.0} ms",
                r.incumbent.y,
                r.compute_time_ms()
            );
            compute += r.compute_time_ms();
            best += r.incumbent.y;
            gps += r.gp_count as f64;
        }
        let n = seeds.len() as f64;
        rows.push(SweepRow {
            subset_size: k,
            runs: seeds.len(),
            mean_compute_time_ms: compute / n,
            mean_best_objective: best / n,
            mean_gp_count: gps / n,
        });
    }
    Ok(SweepReport {
        objective: objective.name.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::RunStatus;

    fn run(a: Algorithm, compute: f64) -> RunSummary {
        RunSummary {
            algorithm: a,
            run: 0,
            seed: 0,
            best_objective: 1.0,
            best_x: vec![0.0],
            evaluations: 10,
            total_time_ms: compute,
            compute_time_ms: compute,
            eval_time_ms: 0.0,
            gp_count: 1,
            status: RunStatus::Completed,
            trace: String::new(),
        }
    }

    #[test]
    fn single_pair_gives_one_ratio_line() {
        let a = CampaignSummary::new("s".into(), 1, vec![run(Algorithm::Bo, 200.0)]);
        let b = CampaignSummary::new("s".into(), 1, vec![run(Algorithm::Dsa, 50.0)]);
        let rep = emit_timing_report(&[a, b]).unwrap();
        assert_eq!(rep.ratios, vec![(Algorithm::Dsa, 0.25)]);
        let text = rep.to_text();
        assert_eq!(text.lines().filter(|l| l.contains("ratio")).count(), 1);
        assert_eq!(rep.to_csv().lines().count(), 3);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(emit_timing_report(&[]).is_err());
    }
}
