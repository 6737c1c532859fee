//! Expected improvement on a 1-d surrogate, maximized with DIRECT the same
//! way the optimizers choose their next point.
//!
//! `cargo run --release --example expected_improvement`

use dimsched::acquisition::AcquisitionContext;
use dimsched::direct::{direct_minimize, Bounds, DirectConfig};
use dimsched::gp::{train_hyperparams, Dataset, GpModel, TrainOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = |x: f64| (x - 0.3).powi(2) + 0.2 * (12.0 * x).sin();
    let xs = [0.0, 0.15, 0.5, 0.7, 1.0];
    let data = Dataset::new(
        xs.iter().map(|&x| vec![x]).collect(),
        xs.iter().map(|&x| f(x)).collect(),
    )?;
    let y_best = data.targets().iter().copied().fold(f64::INFINITY, f64::min);

    let hyper = train_hyperparams(&data, &TrainOptions::default())?;
    let model = GpModel::fit(data, hyper)?;
    let ctx = AcquisitionContext::new(&model, y_best);

    println!("incumbent y_best = {y_best:.4}\n");
    println!("{:>5} {:>9} {:>8} {:>10}", "x", "mean", "sd", "EI");
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        let p = model.predict(&[x])?;
        println!(
            "{x:>5.2} {:>9.4} {:>8.4} {:>10.3e}",
            p.mean,
            p.variance.sqrt(),
            ctx.expected_improvement(&[x])?
        );
    }

    let bounds = Bounds::uniform(1, 0.0, 1.0)?;
    let best = direct_minimize(ctx.objective(), &bounds, &DirectConfig::default())?;
    println!(
        "\nnext sample: x = {:.4} with EI {:.3e}",
        best.x_best[0], -best.f_best
    );
    Ok(())
}
