//! Objective catalog: synthetic benchmarks at 10, 11 and 12 dimensions and a
//! Lotka-Volterra parameter-estimation problem scored by weighted SSE.

pub mod benchmarks;
pub mod ode;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::direct::Bounds;
pub use ode::{
    rk4_integrate, rk4_integrate_with_substeps, weighted_sse, OdeError, OdeProblem, OdeRhs,
    TimeSeriesData,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("unknown benchmark {0:?}")]
    UnknownBenchmark(String),
    #[error("{name} is not defined for dimension {got}")]
    DimensionMismatch { name: String, got: usize },
}

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A named objective over a box.
#[derive(Clone)]
pub struct ObjectiveSpec {
    pub name: String,
    pub dim: usize,
    pub bounds: Bounds,
    pub evaluator: Evaluator,
    pub known_optimum: Option<f64>,
}

impl ObjectiveSpec {
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("bounds", &self.bounds)
            .field("known_optimum", &self.known_optimum)
            .finish_non_exhaustive()
    }
}

pub const BENCHMARKS: [&str; 5] = [
    "sphere",
    "rosenbrock",
    "ackley",
    "styblinski_tang",
    "additive_sphere_rosenbrock",
];

/// Dimensionalities of the catalog instances.
pub const CATALOG_DIMS: [usize; 3] = [10, 11, 12];

fn benchmark_fn(name: &str) -> Option<fn(&[f64]) -> f64> {
    Some(match name {
        "sphere" => benchmarks::sphere,
        "rosenbrock" => benchmarks::rosenbrock,
        "ackley" => benchmarks::ackley,
        "styblinski_tang" => benchmarks::styblinski_tang,
        "additive_sphere_rosenbrock" => benchmarks::additive_sphere_rosenbrock,
        _ => return None,
    })
}

fn min_dim(name: &str) -> usize {
    match name {
        "rosenbrock" | "additive_sphere_rosenbrock" => 2,
        _ => 1,
    }
}

/// Evaluates a named benchmark at `x`.
pub fn eval_benchmark(name: &str, x: &[f64]) -> Result<f64, ObjectiveError> {
    let f = benchmark_fn(name).ok_or_else(|| ObjectiveError::UnknownBenchmark(name.into()))?;
    if x.len() < min_dim(name) {
        return Err(ObjectiveError::DimensionMismatch {
            name: name.into(),
            got: x.len(),
        });
    }
    Ok(f(x))
}

/// A named benchmark at dimension `dim` with its conventional bounds.
pub fn benchmark(name: &str, dim: usize) -> Result<ObjectiveSpec, ObjectiveError> {
    let f = benchmark_fn(name).ok_or_else(|| ObjectiveError::UnknownBenchmark(name.into()))?;
    if dim < min_dim(name) {
        return Err(ObjectiveError::DimensionMismatch {
            name: name.into(),
            got: dim,
        });
    }
    let (lo, hi, opt) = match name {
        "sphere" => (-5.12, 5.12, 0.0),
        "rosenbrock" => (-2.048, 2.048, 0.0),
        "ackley" => (-32.768, 32.768, 0.0),
        "styblinski_tang" => (
            -5.0,
            5.0,
            benchmarks::STYBLINSKI_TANG_MIN_PER_DIM * dim as f64,
        ),
        _ => (-2.048, 2.048, 0.0),
    };
    let bounds = Bounds::uniform(dim, lo, hi).expect("static bounds are valid");
    let label = name.to_string();
    Ok(ObjectiveSpec {
        name: format!("{name}-{dim}"),
        dim,
        bounds,
        evaluator: Arc::new(move |x: &[f64]| {
            assert_eq!(x.len(), dim, "{label} objective expects dimension {dim}");
            f(x)
        }),
        known_optimum: Some(opt),
    })
}

/// Ground-truth `(α, β, γ, δ)` used to synthesize Lotka-Volterra data.
pub const LV_TRUE_PARAMS: [f64; 4] = [1.5, 1.0, 3.0, 1.0];
pub const LV_INITIAL_STATE: [f64; 2] = [10.0, 5.0];
pub const LV_HORIZON: f64 = 10.0;
pub const LV_SAMPLES: usize = 25;
/// Objective value assigned to a blown-up simulation, plus the completed
/// fraction of the horizon.
pub const BLOWUP_PENALTY: f64 = 1e9;

/// `ẋ = αx − βxy`, `ẏ = δxy − γy` with parameters `[α, β, γ, δ]` in
/// `[0.1, 5]⁴`.
pub fn lotka_volterra_problem() -> OdeProblem {
    OdeProblem {
        state_dim: 2,
        rhs: Arc::new(|_, s, p, ds| {
            let (x, y) = (s[0], s[1]);
            ds[0] = p[0] * x - p[1] * x * y;
            ds[1] = p[3] * x * y - p[2] * y;
        }),
        y0: LV_INITIAL_STATE.to_vec(),
        param_dim: 4,
        param_bounds: Bounds::uniform(4, 0.1, 5.0).expect("static bounds are valid"),
    }
}

pub fn lv_times() -> Vec<f64> {
    (0..LV_SAMPLES)
        .map(|i| LV_HORIZON * i as f64 / (LV_SAMPLES - 1) as f64)
        .collect()
}

/// Weighted SSE of a simulation against data, with non-finite simulations
/// mapped to a finite penalty.
pub fn ode_fit_error(problem: &OdeProblem, data: &TimeSeriesData, params: &[f64]) -> f64 {
    match rk4_integrate(problem, params, &data.times) {
        Ok(mut sim) => {
            for ((name, _), (dname, _)) in sim.channels.iter_mut().zip(&data.channels) {
                name.clone_from(dname);
            }
            match weighted_sse(&sim, data) {
                Ok(v) if v.is_finite() => v,
                _ => BLOWUP_PENALTY + 1.0,
            }
        }
        Err(OdeError::NonFiniteState { fraction }) => BLOWUP_PENALTY + fraction,
        Err(_) => BLOWUP_PENALTY + 1.0,
    }
}

/// Synthetic measurements at the ground-truth parameters with additive
/// Gaussian noise.
pub fn lotka_volterra_data(seed: u64, noise_std: f64) -> TimeSeriesData {
    let problem = lotka_volterra_problem();
    let mut sim =
        rk4_integrate(&problem, &LV_TRUE_PARAMS, &lv_times()).expect("ground truth integrates");
    sim.channels[0].0 = "prey".into();
    sim.channels[1].0 = "predator".into();
    if noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_std).expect("noise_std is finite");
        for (_, v) in sim.channels.iter_mut() {
            for y in v.iter_mut() {
                *y += normal.sample(&mut rng);
            }
        }
    }
    sim
}

pub fn make_lotka_volterra_objective(seed: u64, noise_std: f64) -> ObjectiveSpec {
    let problem = lotka_volterra_problem();
    let data = lotka_volterra_data(seed, noise_std);
    let bounds = problem.param_bounds.clone();
    ObjectiveSpec {
        name: "lotka_volterra".into(),
        dim: 4,
        bounds,
        evaluator: Arc::new(move |p: &[f64]| ode_fit_error(&problem, &data, p)),
        known_optimum: if noise_std == 0.0 { Some(0.0) } else { None },
    }
}

/// One catalog row as printed by `list-objectives`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub benchmark: String,
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub known_optimum: Option<f64>,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for b in BENCHMARKS {
        for d in CATALOG_DIMS {
            let spec = benchmark(b, d).expect("catalog entries are valid");
            out.push(CatalogEntry {
                name: spec.name.clone(),
                benchmark: b.into(),
                dim: d,
                lower: spec.bounds.lower()[0],
                upper: spec.bounds.upper()[0],
                known_optimum: spec.known_optimum,
            });
        }
    }
    let lv = lotka_volterra_problem();
    out.push(CatalogEntry {
        name: "lotka_volterra".into(),
        benchmark: "lotka_volterra".into(),
        dim: lv.param_dim,
        lower: lv.param_bounds.lower()[0],
        upper: lv.param_bounds.upper()[0],
        known_optimum: Some(0.0),
    });
    out
}

/// Looks up an objective by benchmark name, with `dim` ignored for the
/// Lotka-Volterra problem.
pub fn resolve(
    name: &str,
    dim: usize,
    seed: u64,
    noise_std: f64,
) -> Result<ObjectiveSpec, ObjectiveError> {
    if name == "lotka_volterra" {
        return Ok(make_lotka_volterra_objective(seed, noise_std));
    }
    benchmark(name, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_and_bad_dimension() {
        assert_eq!(
            eval_benchmark("nope", &[0.0]),
            Err(ObjectiveError::UnknownBenchmark("nope".into()))
        );
        assert!(matches!(
            eval_benchmark("rosenbrock", &[1.0]),
            Err(ObjectiveError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn catalog_has_10_11_12_dimensions() {
        let cat = catalog();
        for d in [10, 11, 12] {
            assert!(cat.iter().any(|e| e.dim == d && e.benchmark == "ackley"));
        }
        assert_eq!(cat.len(), BENCHMARKS.len() * 3 + 1);
    }

    #[test]
    fn lotka_volterra_truth_is_zero_without_noise() {
        let obj = make_lotka_volterra_objective(1, 0.0);
        assert!(obj.eval(&LV_TRUE_PARAMS).abs() < 1e-10);
        let noisy = make_lotka_volterra_objective(1, 0.2);
        assert!(noisy.eval(&LV_TRUE_PARAMS) > 0.0);
    }
}
