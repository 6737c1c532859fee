//! Per-dimension scheduling weights from PCA of the observed inputs, and
//! weighted sampling of coordinate subsets.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::numerics::{eigen_sym, LinalgError, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedulerError {
    #[error("need at least 2 points of dimension >= 2 (got {points} points, dimension {dim})")]
    TooFewPoints { points: usize, dim: usize },
    #[error("invalid subset {dims:?} for dimension {dim}")]
    InvalidSubset { dims: Vec<usize>, dim: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Probability of scheduling each coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    /// Normalizes nonnegative weights and mixes in `floor_eps` of the uniform
    /// distribution: `p = (1 − ε)·w/Σw + ε/d`.
    pub fn from_weights(weights: &[f64], floor_eps: f64) -> Self {
        let d = weights.len();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Self::uniform(d);
        }
        Self(
            weights
                .iter()
                .map(|w| (1.0 - floor_eps) * w / total + floor_eps / d as f64)
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Outcome of the PCA weighting; `degenerate` is set when every point was
/// identical and the uniform fallback was used.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionWeights {
    pub probabilities: ProbabilityVector,
    /// Per-coordinate importance `s_j = Σ_m λ_m V_jm²`.
    pub importance: Vec<f64>,
    pub degenerate: bool,
}

/// Sample covariance (divisor `n − 1`) of the rows of `points`.
pub fn sample_covariance(points: &[Vec<f64>]) -> SymMatrix {
    let n = points.len();
    let d = points[0].len();
    let mut mean = vec![0.0; d];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v / n as f64;
        }
    }
    SymMatrix::from_fn(d, |i, j| {
        points
            .iter()
            .map(|p| (p[i] - mean[i]) * (p[j] - mean[j]))
            .sum::<f64>()
            / (n - 1) as f64
    })
}

/// PCA of the observed inputs, with eigenvalue mass mapped back onto
/// coordinates through squared loadings, then floored.
pub fn compute_dimension_probabilities(
    points: &[Vec<f64>],
    floor_eps: f64,
) -> Result<DimensionWeights, SchedulerError> {
    let dim = points.first().map_or(0, Vec::len);
    if points.len() < 2 || dim < 2 {
        return Err(SchedulerError::TooFewPoints {
            points: points.len(),
            dim,
        });
    }
    let cov = sample_covariance(points);
    let eig = eigen_sym(&cov)?;
    let importance: Vec<f64> = (0..dim)
        .map(|j| {
            eig.eigenvalues
                .iter()
                .enumerate()
                .map(|(m, lambda)| lambda.max(0.0) * eig.vector_entry(j, m).powi(2))
                .sum()
        })
        .collect();
    let total: f64 = importance.iter().sum();
    if !(total > 0.0) {
        return Ok(DimensionWeights {
            probabilities: ProbabilityVector::uniform(dim),
            importance,
            degenerate: true,
        });
    }
    Ok(DimensionWeights {
        probabilities: ProbabilityVector::from_weights(&importance, floor_eps),
        importance,
        degenerate: false,
    })
}

/// Sorted, distinct coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimensionSubset(Vec<usize>);

impl DimensionSubset {
    pub fn new(mut dims: Vec<usize>, d: usize) -> Result<Self, SchedulerError> {
        dims.sort_unstable();
        let distinct = dims.windows(2).all(|w| w[0] != w[1]);
        if dims.is_empty() || !distinct || dims.iter().any(|&j| j >= d) {
            return Err(SchedulerError::InvalidSubset { dims, dim: d });
        }
        Ok(Self(dims))
    }

    pub fn full(d: usize) -> Self {
        Self((0..d).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn key(&self) -> SubsetKey {
        canonical_key(self)
    }
}

/// `0-3-7` style, as written in trace files.
impl fmt::Display for DimensionSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

/// Registry key: a bitmask over coordinates, so it ignores ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetKey(u64);

impl SubsetKey {
    pub fn bits(self) -> u64 {
        self.0
    }
}

pub fn canonical_key(z: &DimensionSubset) -> SubsetKey {
    SubsetKey(z.0.iter().fold(0u64, |acc, &j| acc | (1u64 << j)))
}

/// Draws `k` coordinates without replacement, each draw proportional to the
/// remaining probability mass.
pub fn sample_subset<R: Rng + ?Sized>(
    p: &ProbabilityVector,
    k: usize,
    rng: &mut R,
) -> DimensionSubset {
    let d = p.dim();
    assert!((1..=d).contains(&k), "subset size {k} outside 1..={d}");
    let mut weights = p.0.clone();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let mut total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            // Only zero-probability coordinates remain: draw among them evenly.
            for (j, w) in weights.iter_mut().enumerate() {
                if !chosen.contains(&j) {
                    *w = 1.0;
                }
            }
            total = (d - chosen.len()) as f64;
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = None;
        for (j, w) in weights.iter().enumerate() {
            if *w <= 0.0 {
                continue;
            }
            pick = Some(j);
            if u < *w {
                break;
            }
            u -= w;
        }
        let j = pick.expect("positive remaining weight");
        chosen.push(j);
        weights[j] = 0.0;
    }
    chosen.sort_unstable();
    DimensionSubset(chosen)
}
