//! Closed-form synthetic test functions.

use std::f64::consts::{E, PI};

/// Global minimum of one Styblinski-Tang coordinate, at `x ≈ −2.903534`.
pub const STYBLINSKI_TANG_MIN_PER_DIM: f64 = -39.166_165_703_771_42;

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
    let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

pub fn styblinski_tang(x: &[f64]) -> f64 {
    0.5 * x
        .iter()
        .map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v)
        .sum::<f64>()
}

/// Sphere on the first `⌊d/2⌋` coordinates plus a Rosenbrock chain on the
/// rest. Minimum 0 at `(0, …, 0, 1, …, 1)`.
pub fn additive_sphere_rosenbrock(x: &[f64]) -> f64 {
    let h = x.len() / 2;
    sphere(&x[..h]) + rosenbrock(&x[h..])
}
