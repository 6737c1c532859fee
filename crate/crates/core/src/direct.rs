//! DIRECT (DIviding RECTangles) global minimization over a box.
//!
//! Rectangles live in the normalized cube `[0,1]^d`; a side at division
//! level `k` has length `3^-k`. Each iteration picks the potentially optimal
//! rectangles (lower-right convex hull of `(diameter, f)` with the
//! ε-improvement test) and trisects them along their longest sides.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirectError {
    #[error("objective returned a non-finite value {value} at {x:?}")]
    NonFiniteObjective { x: Vec<f64>, value: f64 },
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Finite hyper-rectangle `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, DirectError> {
        if lower.len() != upper.len() {
            return Err(DirectError::InvalidBounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(DirectError::InvalidBounds("zero-dimensional box".into()));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(DirectError::InvalidBounds(format!(
                    "coordinate {j}: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` on every coordinate.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self, DirectError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn ranges(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .collect()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// Restriction to a subset of coordinates.
    pub fn select(&self, dims: &[usize]) -> Bounds {
        Bounds {
            lower: dims.iter().map(|&j| self.lower[j]).collect(),
            upper: dims.iter().map(|&j| self.upper[j]).collect(),
        }
    }

    /// Maps a point of the unit cube into the box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(t, (l, h))| (l + t * (h - l)).clamp(*l, *h))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirectConfig {
    pub max_evals: usize,
    pub max_iters: usize,
    /// Potential-optimality slack ε.
    pub epsilon: f64,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            max_iters: 100,
            epsilon: 1e-4,
        }
    }
}

impl DirectConfig {
    fn validate(&self) -> Result<(), DirectError> {
        if self.max_evals == 0 || self.max_iters == 0 || !(self.epsilon > 0.0) {
            return Err(DirectError::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

/// A rectangle of the normalized partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    pub center: Vec<f64>,
    /// Division count per axis; side length is `3^-level`.
    pub levels: Vec<u32>,
    pub f_center: f64,
    /// Creation order, used for deterministic tie-breaking.
    pub index: usize,
}

impl Rect {
    pub fn side(&self, j: usize) -> f64 {
        third_pow(self.levels[j])
    }

    /// Half the diagonal.
    pub fn diameter(&self) -> f64 {
        let mut levels = self.levels.clone();
        levels.sort_unstable();
        0.5 * levels
            .iter()
            .map(|&k| third_pow(k).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn measure(&self) -> f64 {
        self.levels.iter().map(|&k| third_pow(k)).product()
    }

    fn min_level(&self) -> u32 {
        self.levels.iter().copied().min().unwrap_or(0)
    }
}

#[inline]
fn third_pow(k: u32) -> f64 {
    3f64.powi(-(k as i32))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectResult {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub evals: usize,
    pub iterations: usize,
}

/// Indices of the potentially optimal rectangles.
///
/// Within each diameter class only the lowest `f_center` (lowest `index` on
/// ties) is a candidate. A candidate `j` is kept when some rate `K ≥ 0`
/// makes `f_j − K·d_j` minimal over all classes and
/// `f_j − K·d_j ≤ f_min − ε|f_min|`.
pub fn potentially_optimal(rects: &[Rect], f_min: f64, epsilon: f64) -> Vec<usize> {
    // Diameters are computed from sorted levels, so equal level multisets
    // give bitwise-equal diameters; grouping still allows a relative
    // tolerance for distinct multisets with equal true diameter.
    let diam: Vec<f64> = rects.iter().map(Rect::diameter).collect();
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| diam[a].total_cmp(&diam[b]).then(a.cmp(&b)));
    let mut candidates: Vec<(f64, f64, usize)> = Vec::new();
    let mut group_start = 0;
    for pos in 1..=order.len() {
        let ends = pos == order.len() || {
            let (d0, d1) = (diam[order[group_start]], diam[order[pos]]);
            (d1 - d0).abs() > 1e-12 * d0.max(1e-300)
        };
        if !ends {
            continue;
        }
        let best = order[group_start..pos]
            .iter()
            .copied()
            .min_by(|&a, &b| {
                rects[a]
                    .f_center
                    .total_cmp(&rects[b].f_center)
                    .then(rects[a].index.cmp(&rects[b].index))
            })
            .expect("nonempty group");
        candidates.push((diam[best], rects[best].f_center, best));
        group_start = pos;
    }

    let threshold = f_min - epsilon * f_min.abs();
    let mut selected = Vec::new();
    for (j, &(dj, fj, idx)) in candidates.iter().enumerate() {
        let k_lo = candidates[..j]
            .iter()
            .map(|&(di, fi, _)| (fj - fi) / (dj - di))
            .fold(0.0_f64, f64::max);
        let k_hi = candidates[j + 1..]
            .iter()
            .map(|&(di, fi, _)| (fi - fj) / (di - dj))
            .fold(f64::INFINITY, f64::min);
        if k_lo > k_hi {
            continue;
        }
        let passes_eps = if k_hi.is_infinite() {
            true
        } else {
            fj - k_hi * dj <= threshold
        };
        if passes_eps {
            selected.push(idx);
        }
    }
    selected.sort_unstable();
    selected
}

/// Evaluation counter that enforces the budget and maps unit-cube points
/// into the user's box.
struct Evaluator<'a, F> {
    g: F,
    bounds: &'a Bounds,
    evals: usize,
    budget: usize,
    best: (Vec<f64>, f64),
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<'_, F> {
    fn remaining(&self) -> usize {
        self.budget - self.evals
    }

    fn eval(&mut self, u: &[f64]) -> Result<f64, DirectError> {
        let x = self.bounds.from_unit(u);
        let v = (self.g)(&x);
        self.evals += 1;
        if !v.is_finite() {
            return Err(DirectError::NonFiniteObjective { x, value: v });
        }
        if v < self.best.1 {
            self.best = (x, v);
        }
        Ok(v)
    }
}

/// Divides `rects[idx]` along its longest sides, appending new rectangles to
/// `rects`. Only as many axes are sampled as the remaining budget allows
/// (two evaluations each). Returns the number of axes divided.
fn trisect_in_place<F: FnMut(&[f64]) -> f64>(
    rects: &mut Vec<Rect>,
    idx: usize,
    ev: &mut Evaluator<'_, F>,
) -> Result<usize, DirectError> {
    let parent = rects[idx].clone();
    let min_level = parent.min_level();
    let delta = third_pow(min_level + 1);
    let longest: Vec<usize> = (0..parent.levels.len())
        .filter(|&j| parent.levels[j] == min_level)
        .collect();

    let mut samples: Vec<(usize, Vec<f64>, f64, Vec<f64>, f64)> = Vec::new();
    for &j in &longest {
        if ev.remaining() < 2 {
            break;
        }
        let mut plus = parent.center.clone();
        plus[j] += delta;
        let mut minus = parent.center.clone();
        minus[j] -= delta;
        let fp = ev.eval(&plus)?;
        let fm = ev.eval(&minus)?;
        samples.push((j, plus, fp, minus, fm));
    }
    // Divide first along the axis with the best sample.
    samples.sort_by(|a, b| a.2.min(a.4).total_cmp(&b.2.min(b.4)).then(a.0.cmp(&b.0)));

    let mut levels = parent.levels.clone();
    for (j, plus, fp, minus, fm) in &samples {
        levels[*j] += 1;
        for (center, f) in [(plus, *fp), (minus, *fm)] {
            let index = rects.len();
            rects.push(Rect {
                center: center.clone(),
                levels: levels.clone(),
                f_center: f,
                index,
            });
        }
    }
    rects[idx].levels = levels;
    Ok(samples.len())
}

/// Trisects a standalone rectangle against `g` over the unit cube, returning
/// the resulting pieces: the shrunken parent first, then the new children in
/// division order.
pub fn trisect<F: FnMut(&[f64]) -> f64>(
    rect: &Rect,
    g: F,
    evals_budget: usize,
) -> Result<(Vec<Rect>, usize), DirectError> {
    let unit = Bounds::uniform(rect.center.len(), 0.0, 1.0)?;
    let mut ev = Evaluator {
        g,
        bounds: &unit,
        evals: 0,
        budget: evals_budget,
        best: (rect.center.clone(), rect.f_center),
    };
    let mut rects = vec![Rect {
        index: 0,
        ..rect.clone()
    }];
    trisect_in_place(&mut rects, 0, &mut ev)?;
    Ok((rects, ev.evals))
}

/// DIRECT state after each iteration, for callers that want to inspect the
/// partition.
pub struct DirectRun {
    pub rects: Vec<Rect>,
    pub result: DirectResult,
}

/// Minimizes `g` over `bounds`; see [`direct_minimize_with_partition`].
pub fn direct_minimize<F: FnMut(&[f64]) -> f64>(
    g: F,
    bounds: &Bounds,
    config: &DirectConfig,
) -> Result<DirectResult, DirectError> {
    direct_minimize_with_partition(g, bounds, config, |_| {}).map(|r| r.result)
}

/// Runs DIRECT and calls `on_iteration` with the partition after every
/// completed iteration.
pub fn direct_minimize_with_partition<F: FnMut(&[f64]) -> f64>(
    g: F,
    bounds: &Bounds,
    config: &DirectConfig,
    mut on_iteration: impl FnMut(&[Rect]),
) -> Result<DirectRun, DirectError> {
    config.validate()?;
    let d = bounds.dim();
    let mut ev = Evaluator {
        g,
        bounds,
        evals: 0,
        budget: config.max_evals,
        best: (Vec::new(), f64::INFINITY),
    };
    let center = vec![0.5; d];
    let f0 = ev.eval(&center)?;
    let mut rects = vec![Rect {
        center,
        levels: vec![0; d],
        f_center: f0,
        index: 0,
    }];

    let mut iterations = 0;
    while iterations < config.max_iters && ev.remaining() >= 2 {
        let f_min = ev.best.1;
        let chosen = potentially_optimal(&rects, f_min, config.epsilon);
        iterations += 1;
        for idx in chosen {
            if ev.remaining() < 2 {
                break;
            }
            trisect_in_place(&mut rects, idx, &mut ev)?;
        }
        on_iteration(&rects);
    }

    let (x_best, f_best) = ev.best.clone();
    Ok(DirectRun {
        rects,
        result: DirectResult {
            x_best,
            f_best,
            evals: ev.evals,
            iterations,
        },
    })
}
