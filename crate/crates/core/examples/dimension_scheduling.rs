//! The coordinate scheduler: PCA of observed points turns into per-coordinate
//! selection probabilities, and subsets are drawn from them.
//!
//! `cargo run --release --example dimension_scheduling`

use std::collections::BTreeMap;

use dimsched::scheduler::{compute_dimension_probabilities, sample_subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Points spread widely in x0 and x3, narrowly elsewhere.
    let spread = [5.0, 0.5, 0.5, 3.0, 0.5, 0.5];
    let points: Vec<Vec<f64>> = (0..200)
        .map(|_| {
            spread
                .iter()
                .map(|s| s * rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();

    let w = compute_dimension_probabilities(&points, 0.1)?;
    println!("{:>4} {:>10} {:>8}", "dim", "importance", "p");
    for (j, (s, p)) in w
        .importance
        .iter()
        .zip(w.probabilities.as_slice())
        .enumerate()
    {
        println!("{j:>4} {s:>10.3} {p:>8.4}");
    }

    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for _ in 0..10_000 {
        let z = sample_subset(&w.probabilities, 2, &mut rng);
        *counts.entry(z.dims().to_vec()).or_default() += 1;
    }
    let mut ranked: Vec<_> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    println!("\nmost frequent pairs in 10000 draws:");
    for (dims, n) in ranked.iter().take(5) {
        println!("  {dims:?}: {n}");
    }
    Ok(())
}
