use std::sync::mpsc;
use std::thread;
use std::time::Instant;

use super::dsa::{solve, Commit, DsaEngine, Plan, Proposal, Task};
use super::{Algorithm, OptimizeError, RunConfig, RunResult};
use crate::direct::Bounds;

/// DSA with a manager and `workers` solver threads.
///
/// Workers fetch-or-spawn `GP_Z` and minimize its acquisition for distinct
/// subsets concurrently. The manager, on the calling thread, owns the
/// objective and serializes evaluations, incumbent updates and GP
/// augmentations. A GP is owned by at most one in-flight task; a planner that
/// keeps drawing checked-out subsets waits for a result before retrying.
/// With one worker the trace matches [`run_dsa`](super::run_dsa) apart from
/// timing columns.
pub fn run_dsa_parallel<F>(
    mut objective: F,
    bounds: &Bounds,
    config: &RunConfig,
    workers: usize,
) -> Result<RunResult, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    if workers == 0 {
        return Err(OptimizeError::Config("workers must be >= 1".into()));
    }
    let mut engine = DsaEngine::new(&mut objective, bounds, config)?;

    thread::scope(|scope| -> Result<(), OptimizeError> {
        let (result_tx, result_rx) = mpsc::channel::<(usize, Result<Proposal, OptimizeError>)>();
        let mut task_txs = Vec::with_capacity(workers);
        for w in 0..workers {
            let (task_tx, task_rx) = mpsc::channel::<Task>();
            let result_tx = result_tx.clone();
            scope.spawn(move || {
                for task in task_rx {
                    if result_tx.send((w, solve(task))).is_err() {
                        break;
                    }
                }
            });
            task_txs.push(task_tx);
        }
        drop(result_tx);

        let mut idle: Vec<usize> = (0..workers).rev().collect();
        let mut in_flight = 0usize;
        let mut aborted = false;
        let mut last_commit = Instant::now();
        loop {
            while !aborted && engine.planned() < config.max_iter {
                let Some(&w) = idle.last() else { break };
                match engine.plan() {
                    Plan::Ready(task) => {
                        idle.pop();
                        task_txs[w]
                            .send(task)
                            .map_err(|_| OptimizeError::Worker(format!("worker {w} hung up")))?;
                        in_flight += 1;
                    }
                    Plan::Blocked => break,
                }
            }
            if in_flight == 0 {
                break;
            }
            let (w, result) = result_rx
                .recv()
                .map_err(|_| OptimizeError::Worker("all workers hung up".into()))?;
            in_flight -= 1;
            idle.push(w);
            let proposal = result?;
            if aborted {
                continue;
            }
            let since = last_commit.max(proposal.planned_at);
            if let Commit::Aborted = engine.commit(proposal, &mut objective, since)? {
                aborted = true;
            }
            last_commit = Instant::now();
        }
        drop(task_txs);
        Ok(())
    })?;

    Ok(engine.finish(Algorithm::DsaParallel).0)
}
