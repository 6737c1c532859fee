use std::path::Path;

use super::config::CampaignConfig;
use super::summary::{CampaignSummary, RunSummary};
use super::trace::{write_trace_file, TraceOptions};
use super::HarnessError;
use crate::optimize::{
    run_bo, run_dsa, run_dsa_parallel, Algorithm, OptimizeError, RunConfig, RunResult,
};

fn map_err(e: OptimizeError) -> HarnessError {
    match e {
        OptimizeError::Config(m) => HarnessError::Config(m),
        other => HarnessError::Runtime(other.to_string()),
    }
}

pub fn trace_file_name(algorithm: Algorithm, run: usize) -> String {
    format!("{algorithm}_run{run}.csv")
}

/// Runs every configured algorithm `campaign.runs` times into `out_dir`.
///
/// Run `r` uses seed `run.seed + r` for every algorithm, so all algorithms
/// share the same initial design within a run. Writes one trace per
/// (algorithm, run) and `summary.json`. Runs that abort on a non-finite
/// objective value are kept in the summary with their status.
pub fn run_campaign(
    config: &CampaignConfig,
    out_dir: &Path,
) -> Result<CampaignSummary, HarnessError> {
    config.validate()?;
    let spec = config.objective.resolve()?;
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let trace_opts = TraceOptions {
        timings: config.campaign.record_timing,
    };

    let mut runs = Vec::new();
    for r in 0..config.campaign.runs {
        let seed = config.run.seed.wrapping_add(r as u64);
        let run_cfg = RunConfig {
            seed,
            ..config.run.clone()
        };
        for &alg in &config.campaign.algorithms {
            log::info!("{}: {alg} run {r} (seed {seed})", spec.name);
            let f = |x: &[f64]| spec.eval(x);
            let result: RunResult = match alg {
                Algorithm::Bo => run_bo(f, &spec.bounds, &run_cfg),
                Algorithm::Dsa => run_dsa(f, &spec.bounds, &run_cfg),
                Algorithm::DsaParallel => {
                    run_dsa_parallel(f, &spec.bounds, &run_cfg, config.campaign.workers)
                }
            }
            .map_err(map_err)?;
            if !result.is_completed() {
                log::error!("{alg} run {r} aborted: {:?}", result.status);
            }
            log::info!(
                "{alg} run {r}: best {:.6e} after {} evaluations, {:.0} ms compute",
                result.incumbent.y,
                result.evaluations(),
                result.compute_time_ms()
            );
            let name = trace_file_name(alg, r);
            let records: Vec<_> = result.all_records().cloned().collect();
            write_trace_file(&out_dir.join(&name), spec.dim, &records, trace_opts)?;
            runs.push(RunSummary::from_result(&result, r, seed, name));
        }
    }

    let summary = CampaignSummary::new(spec.name.clone(), spec.dim, runs);
    summary.write(&out_dir.join("summary.json"))?;
    Ok(summary)
}
