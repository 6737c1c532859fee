//! Standard Bayesian optimization against dimension-scheduled optimization
//! on a 10-d benchmark, from the same initial design.
//!
//! `cargo run --release --example bo_vs_dsa -- [benchmark] [iterations]`

use dimsched::objectives::benchmark;
use dimsched::optimize::{run_bo, run_dsa, RunConfig, RunResult};

fn describe(r: &RunResult) {
    println!(
        "{:>4}: best {:>12.4}  compute {:>9.0} ms  objective {:>6.0} ms  GPs {}",
        r.algorithm.as_str(),
        r.incumbent.y,
        r.compute_time_ms(),
        r.eval_time_ms(),
        r.gp_count
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "styblinski_tang".into());
    let iters: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);

    let spec = benchmark(&name, 10)?;
    let config = RunConfig {
        max_iter: iters,
        train_max_iters: 50,
        seed: 1,
        ..RunConfig::default()
    };
    println!(
        "{} in 10 dimensions, {iters} iterations after {} design points",
        spec.name, config.n_init
    );
    if let Some(opt) = spec.known_optimum {
        println!("known optimum {opt:.4}");
    }

    let dsa = run_dsa(|x: &[f64]| spec.eval(x), &spec.bounds, &config)?;
    describe(&dsa);
    let bo = run_bo(|x: &[f64]| spec.eval(x), &spec.bounds, &config)?;
    describe(&bo);
    println!(
        "compute-time ratio dsa/bo: {:.3}",
        dsa.compute_time_ms() / bo.compute_time_ms()
    );
    Ok(())
}
