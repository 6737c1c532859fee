//! Optimizer loops: classical BO over one full-dimensional GP, and dimension
//! scheduling (DSA) over a registry of subspace GPs, sequential or with a
//! manager/worker pool.

mod bo;
mod dsa;
mod parallel;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::direct::{Bounds, DirectConfig, DirectError};
use crate::gp::{Dataset, GpError, TrainOptions};
use crate::scheduler::{DimensionSubset, SchedulerError};

pub use bo::run_bo;
pub use dsa::{run_dsa, run_dsa_with_registry, GpRegistry, RegistryEntry};
pub use parallel::run_dsa_parallel;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("objective returned non-finite value {value} at {x:?}")]
    NonFiniteObjective { x: Vec<f64>, value: f64 },
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Direct(#[from] DirectError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error("worker thread failed: {0}")]
    Worker(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Bo,
    Dsa,
    DsaParallel,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Bo => "bo",
            Algorithm::Dsa => "dsa",
            Algorithm::DsaParallel => "dsa-parallel",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bo" => Ok(Algorithm::Bo),
            "dsa" => Ok(Algorithm::Dsa),
            "dsa-parallel" => Ok(Algorithm::DsaParallel),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

/// Settings shared by both optimizer loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n_init: usize,
    pub max_iter: usize,
    pub subset_size: usize,
    /// Iterations between PCA refreshes of the scheduling probabilities.
    pub pca_period: usize,
    pub floor_eps: f64,
    pub seed: u64,
    /// Augmentations of a GP between hyperparameter retrainings.
    pub retrain_period: usize,
    /// Random restarts when a GP is first trained.
    pub train_restarts: usize,
    /// Gradient-ascent iteration cap per hyperparameter start.
    pub train_max_iters: usize,
    pub direct: DirectConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_init: 20,
            max_iter: 500,
            subset_size: 2,
            pca_period: 50,
            floor_eps: 0.1,
            seed: 0,
            retrain_period: 5,
            train_restarts: 3,
            train_max_iters: 200,
            direct: DirectConfig::default(),
        }
    }
}

impl RunConfig {
    /// Checks the settings for a DSA run in `dim` dimensions.
    pub fn validate(&self, dim: usize) -> Result<(), OptimizeError> {
        if self.subset_size == 0 || self.subset_size > dim {
            return Err(OptimizeError::Config(format!(
                "subset_size must be in 1..={dim}, got {}",
                self.subset_size
            )));
        }
        self.validate_common(dim)
    }

    /// Checks everything except the subset size, which BO ignores.
    pub fn validate_common(&self, dim: usize) -> Result<(), OptimizeError> {
        let bad = |m: String| Err(OptimizeError::Config(m));
        if self.n_init < 2 {
            return bad(format!("n_init must be >= 2, got {}", self.n_init));
        }
        if dim > 64 {
            return bad(format!("dimension {dim} exceeds 64"));
        }
        if self.pca_period == 0 || self.retrain_period == 0 {
            return bad("pca_period and retrain_period must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.floor_eps) {
            return bad(format!(
                "floor_eps must be in [0, 1], got {}",
                self.floor_eps
            ));
        }
        if self.direct.max_evals == 0 || self.direct.max_iters == 0 || !(self.direct.epsilon > 0.0)
        {
            return bad(format!("invalid DIRECT settings {:?}", self.direct));
        }
        Ok(())
    }

    fn train_options(&self, seed: u64, scales: Vec<f64>) -> TrainOptions {
        TrainOptions {
            restarts: self.train_restarts,
            seed,
            max_iters: self.train_max_iters,
            scales: Some(scales),
            ..TrainOptions::default()
        }
    }
}

/// Best argument and value observed so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Incumbent {
    /// Argmin over a dataset, lowest index on ties.
    pub fn from_dataset(data: &Dataset) -> Incumbent {
        let (i, y) =
            data.targets()
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |best, (i, y)| {
                        if y < best.1 {
                            (i, y)
                        } else {
                            best
                        }
                    },
                );
        Incumbent {
            x: data.input(i).to_vec(),
            y,
        }
    }

    /// Replaces the incumbent when `y` is strictly better.
    pub fn offer(&mut self, x: &[f64], y: f64) -> bool {
        if y < self.y {
            self.x = x.to_vec();
            self.y = y;
            true
        } else {
            false
        }
    }
}

/// One objective evaluation in a run trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Evaluation index counted from the first design point.
    pub iter: usize,
    /// Coordinates optimized this step (DSA only).
    pub subset: Option<DimensionSubset>,
    pub x: Vec<f64>,
    pub y: f64,
    pub y_best: f64,
    pub wall_time_ms: f64,
    pub eval_time_ms: f64,
    /// Training-set size of the GP that received this observation.
    pub gp_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Aborted { reason: String },
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub algorithm: Algorithm,
    /// The initial design, one record per point (`gp_size` 0).
    pub design: Vec<IterationRecord>,
    /// One record per optimizer iteration.
    pub records: Vec<IterationRecord>,
    pub incumbent: Incumbent,
    pub total_time_ms: f64,
    pub gp_count: usize,
    pub status: RunStatus,
}

impl RunResult {
    pub fn all_records(&self) -> impl Iterator<Item = &IterationRecord> {
        self.design.iter().chain(&self.records)
    }

    pub fn eval_time_ms(&self) -> f64 {
        self.all_records().map(|r| r.eval_time_ms).sum()
    }

    /// Wall time spent outside objective evaluations.
    pub fn compute_time_ms(&self) -> f64 {
        (self.total_time_ms - self.eval_time_ms()).max(0.0)
    }

    pub fn evaluations(&self) -> usize {
        self.design.len() + self.records.len()
    }

    pub fn is_completed(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

pub(crate) fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub(crate) fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for the initial design; identical for every algorithm given a seed.
pub fn design_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// RNG for algorithm decisions after the design.
pub(crate) fn algorithm_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Evaluates `objective` at `n_init` uniform random points in `bounds`.
pub fn initial_design<F, R>(
    objective: &mut F,
    bounds: &Bounds,
    n_init: usize,
    rng: &mut R,
) -> Result<Dataset, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    timed_design(objective, bounds, n_init, rng).map(|(data, _)| data)
}

pub(crate) fn timed_design<F, R>(
    objective: &mut F,
    bounds: &Bounds,
    n_init: usize,
    rng: &mut R,
) -> Result<(Dataset, Vec<IterationRecord>), OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    if n_init < 2 {
        return Err(OptimizeError::Config(format!(
            "n_init must be >= 2, got {n_init}"
        )));
    }
    let mut data = Dataset::empty(bounds.dim());
    let mut records = Vec::with_capacity(n_init);
    let mut y_best = f64::INFINITY;
    for iter in 0..n_init {
        let x: Vec<f64> = bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(lo, hi)| rng.random_range(*lo..*hi))
            .collect();
        let t = Instant::now();
        let y = objective(&x);
        let ms = elapsed_ms(t);
        if !y.is_finite() {
            return Err(OptimizeError::NonFiniteObjective { x, value: y });
        }
        y_best = y_best.min(y);
        data.push(&x, y)?;
        records.push(IterationRecord {
            iter,
            subset: None,
            x,
            y,
            y_best,
            wall_time_ms: ms,
            eval_time_ms: ms,
            gp_size: 0,
        });
    }
    Ok((data, records))
}
