//! Parameter estimation for a predator-prey ODE: simulate noisy data from
//! known rates, then recover the rates by minimizing the fit error with DSA.
//!
//! `cargo run --release --example lotka_volterra`

use dimsched::objectives::ode::rk4_integrate;
use dimsched::objectives::{
    lotka_volterra_problem, lv_times, make_lotka_volterra_objective, LV_TRUE_PARAMS,
};
use dimsched::optimize::{run_dsa, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = rk4_integrate(&lotka_volterra_problem(), &LV_TRUE_PARAMS, &lv_times())?;
    println!("true trajectory (first rows):");
    let mut out = Vec::new();
    truth.write_csv(&mut out)?;
    for line in String::from_utf8(out)?.lines().take(5) {
        println!("  {line}");
    }

    let objective = make_lotka_volterra_objective(11, 0.05);
    println!(
        "\nfit error at the true rates with 5% noise: {:.4}",
        objective.eval(&LV_TRUE_PARAMS)
    );

    let config = RunConfig {
        max_iter: 150,
        train_max_iters: 50,
        seed: 4,
        ..RunConfig::default()
    };
    let r = run_dsa(|p: &[f64]| objective.eval(p), &objective.bounds, &config)?;
    println!(
        "DSA after {} evaluations: error {:.4} at rates {:.3?}",
        r.evaluations(),
        r.incumbent.y,
        r.incumbent.x
    );
    println!("true rates: {LV_TRUE_PARAMS:?}");
    Ok(())
}
