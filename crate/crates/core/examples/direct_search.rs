//! Derivative-free global minimization with DIRECT on the six-hump camel
//! function, which has two global minima and four local ones.
//!
//! `cargo run --release --example direct_search`

use dimsched::direct::{direct_minimize_with_partition, Bounds, DirectConfig};

fn camel(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (4.0 - 2.1 * a * a + a.powi(4) / 3.0) * a * a + a * b + (-4.0 + 4.0 * b * b) * b * b
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = Bounds::new(vec![-3.0, -2.0], vec![3.0, 2.0])?;
    for budget in [50, 200, 1000] {
        let config = DirectConfig {
            max_evals: budget,
            ..DirectConfig::default()
        };
        let mut rect_count = 0;
        let run = direct_minimize_with_partition(camel, &bounds, &config, |rects| {
            rect_count = rects.len();
        })?;
        let r = run.result;
        println!(
            "budget {budget:>5}: f = {:+.6} at ({:+.4}, {:+.4}) after {} evals, {} iterations, {} rectangles",
            r.f_best, r.x_best[0], r.x_best[1], r.evals, r.iterations, rect_count
        );
    }
    println!("known minimum: -1.031628 at (±0.0898, ∓0.7126)");
    Ok(())
}
