//! Fit an ARD Gaussian process to noisy samples of a 2-d function, train its
//! hyperparameters by marginal likelihood, and inspect predictions.
//!
//! `cargo run --release --example gp_regression`

use dimsched::gp::{log_marginal_likelihood, train_hyperparams, Dataset, GpModel, TrainOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn truth(x: &[f64]) -> f64 {
    // Varies quickly along x0 and barely along x1.
    (3.0 * x[0]).sin() + 0.1 * x[1]
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut data = Dataset::empty(2);
    for _ in 0..30 {
        let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let y = truth(&x) + 0.05 * rng.random_range(-1.0..1.0);
        data.push(&x, y)?;
    }

    let hyper = train_hyperparams(&data, &TrainOptions::default().with_seed(1))?;
    println!(
        "lengthscales: [{:.3}, {:.3}]  signal var: {:.3}  noise var: {:.2e}",
        hyper.lengthscale(0),
        hyper.lengthscale(1),
        hyper.signal_variance(),
        hyper.noise_variance()
    );
    println!(
        "log marginal likelihood: {:.3}",
        log_marginal_likelihood(&data, &hyper)?
    );

    let model = GpModel::fit(data, hyper)?;
    println!(
        "\n{:>6} {:>6} {:>9} {:>9} {:>8}",
        "x0", "x1", "truth", "mean", "sd"
    );
    for x0 in [-1.5, -0.5, 0.0, 0.5, 1.5] {
        let x = [x0, 0.3];
        let p = model.predict(&x)?;
        println!(
            "{:>6.2} {:>6.2} {:>9.4} {:>9.4} {:>8.4}",
            x[0],
            x[1],
            truth(&x),
            p.mean,
            p.variance.sqrt()
        );
    }

    // Far from the data the posterior falls back to the prior.
    let far = model.predict(&[40.0, 40.0])?;
    println!(
        "\nfar away: mean {:.4} sd {:.4}",
        far.mean,
        far.variance.sqrt()
    );
    Ok(())
}
