//! Manager/worker DSA: workers choose candidates for different coordinate
//! subsets concurrently while the manager evaluates the objective in order.
//!
//! `cargo run --release --example parallel_dsa -- [workers]`

use dimsched::objectives::benchmark;
use dimsched::optimize::{run_dsa, run_dsa_parallel, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let workers: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(4);
    let spec = benchmark("ackley", 10)?;
    let config = RunConfig {
        max_iter: 120,
        train_max_iters: 50,
        seed: 2,
        ..RunConfig::default()
    };

    let seq = run_dsa(|x: &[f64]| spec.eval(x), &spec.bounds, &config)?;
    let par = run_dsa_parallel(|x: &[f64]| spec.eval(x), &spec.bounds, &config, workers)?;
    for r in [&seq, &par] {
        println!(
            "{:>12}: best {:>9.4}  wall {:>7.0} ms  GPs {}",
            r.algorithm.as_str(),
            r.incumbent.y,
            r.total_time_ms,
            r.gp_count
        );
    }
    println!(
        "cores available: {}",
        std::thread::available_parallelism().map_or(1, |n| n.get())
    );
    Ok(())
}
