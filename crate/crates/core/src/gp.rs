//! Gaussian process regression with an ARD squared-exponential kernel.
//!
//! Targets are centered on their empirical mean before fitting, so the
//! zero-mean prior applies to `y - mean(y)`. All hyperparameters live in log
//! space: per-dimension lengthscales, signal variance and noise variance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numerics::{cholesky_spd, solve_chol, CholFactor, LinalgError, SymMatrix};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dataset has {inputs} inputs but {targets} targets")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("non-finite value in training data")]
    NonFinite,
    #[error("need at least {needed} training points, have {have}")]
    TooFewPoints { needed: usize, have: usize },
}

/// Training inputs (flattened row-major, `len × dim`) and scalar targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            inputs: Vec::new(),
            targets: Vec::new(),
        }
    }

    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, GpError> {
        if inputs.len() != targets.len() {
            return Err(GpError::LengthMismatch {
                inputs: inputs.len(),
                targets: targets.len(),
            });
        }
        let dim = inputs.first().map_or(0, Vec::len);
        let mut ds = Self::empty(dim);
        for (x, y) in inputs.iter().zip(targets) {
            ds.push(x, y)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, x: &[f64], y: f64) -> Result<(), GpError> {
        if x.len() != self.dim {
            return Err(GpError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(GpError::NonFinite);
        }
        self.inputs.extend_from_slice(x);
        self.targets.push(y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn inputs(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.inputs.chunks_exact(self.dim.max(1)).take(self.len())
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Restriction of every input to the given coordinates.
    pub fn project(&self, dims: &[usize]) -> Dataset {
        let mut inputs = Vec::with_capacity(self.len() * dims.len());
        for i in 0..self.len() {
            let x = self.input(i);
            inputs.extend(dims.iter().map(|&j| x[j]));
        }
        Dataset {
            dim: dims.len(),
            inputs,
            targets: self.targets.clone(),
        }
    }

    fn mean_target(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.targets.iter().sum::<f64>() / self.len() as f64
        }
    }

    fn target_variance(&self) -> f64 {
        let m = self.mean_target();
        if self.is_empty() {
            return 0.0;
        }
        self.targets.iter().map(|y| (y - m).powi(2)).sum::<f64>() / self.len() as f64
    }

    fn centered_targets(&self) -> (f64, Vec<f64>) {
        let m = self.mean_target();
        (m, self.targets.iter().map(|y| y - m).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelHyperparams {
    pub log_lengthscales: Vec<f64>,
    pub log_signal_variance: f64,
    pub log_noise_variance: f64,
}

impl KernelHyperparams {
    pub fn new(lengthscales: &[f64], signal_variance: f64, noise_variance: f64) -> Self {
        Self {
            log_lengthscales: lengthscales.iter().map(|l| l.ln()).collect(),
            log_signal_variance: signal_variance.ln(),
            log_noise_variance: noise_variance.ln(),
        }
    }

    pub fn dim(&self) -> usize {
        self.log_lengthscales.len()
    }

    pub fn signal_variance(&self) -> f64 {
        self.log_signal_variance.exp()
    }

    pub fn noise_variance(&self) -> f64 {
        self.log_noise_variance.exp()
    }

    pub fn lengthscale(&self, j: usize) -> f64 {
        self.log_lengthscales[j].exp()
    }

    /// Flattened `[log ℓ_1..d, log σ_f², log σ_ε²]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.log_lengthscales.clone();
        v.push(self.log_signal_variance);
        v.push(self.log_noise_variance);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let d = v.len() - 2;
        Self {
            log_lengthscales: v[..d].to_vec(),
            log_signal_variance: v[d],
            log_noise_variance: v[d + 1],
        }
    }

    fn inv_sq_lengthscales(&self) -> Vec<f64> {
        self.log_lengthscales
            .iter()
            .map(|l| (-2.0 * l).exp())
            .collect()
    }
}

#[inline]
fn se_eval(x: &[f64], x2: &[f64], inv_sq: &[f64], signal: f64) -> f64 {
    let r2: f64 = x
        .iter()
        .zip(x2)
        .zip(inv_sq)
        .map(|((a, b), w)| (a - b) * (a - b) * w)
        .sum();
    signal * (-0.5 * r2).exp()
}

/// `σ_f² · exp(−½ Σ_j (x_j − x2_j)² / ℓ_j²)`.
pub fn se_kernel(x: &[f64], x2: &[f64], hyper: &KernelHyperparams) -> Result<f64, GpError> {
    let d = hyper.dim();
    for v in [x, x2] {
        if v.len() != d {
            return Err(GpError::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
    }
    Ok(se_eval(
        x,
        x2,
        &hyper.inv_sq_lengthscales(),
        hyper.signal_variance(),
    ))
}

fn check_dims(data: &Dataset, hyper: &KernelHyperparams) -> Result<(), GpError> {
    if data.dim() != hyper.dim() {
        return Err(GpError::DimensionMismatch {
            expected: hyper.dim(),
            got: data.dim(),
        });
    }
    if data.is_empty() {
        return Err(GpError::TooFewPoints { needed: 1, have: 0 });
    }
    Ok(())
}

/// `K + σ_ε² I` over the training inputs.
fn noisy_kernel_matrix(data: &Dataset, hyper: &KernelHyperparams) -> SymMatrix {
    let inv_sq = hyper.inv_sq_lengthscales();
    let signal = hyper.signal_variance();
    let noise = hyper.noise_variance();
    SymMatrix::from_fn(data.len(), |i, j| {
        let k = se_eval(data.input(i), data.input(j), &inv_sq, signal);
        if i == j {
            k + noise
        } else {
            k
        }
    })
}

/// Fitted GP: data, hyperparameters and the cached factorization.
#[derive(Debug, Clone)]
pub struct GpModel {
    data: Dataset,
    hyper: KernelHyperparams,
    factor: CholFactor,
    alpha: Vec<f64>,
    mean_shift: f64,
    inv_sq: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

impl GpModel {
    pub fn fit(data: Dataset, hyper: KernelHyperparams) -> Result<Self, GpError> {
        check_dims(&data, &hyper)?;
        let k = noisy_kernel_matrix(&data, &hyper);
        let factor = cholesky_spd(&k)?;
        let (mean_shift, centered) = data.centered_targets();
        let alpha = solve_chol(&factor, &centered)?;
        let inv_sq = hyper.inv_sq_lengthscales();
        Ok(Self {
            data,
            hyper,
            factor,
            alpha,
            mean_shift,
            inv_sq,
        })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn hyper(&self) -> &KernelHyperparams {
        &self.hyper
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn mean_shift(&self) -> f64 {
        self.mean_shift
    }

    pub fn factor(&self) -> &CholFactor {
        &self.factor
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Posterior mean and variance before the variance is clamped at zero.
    pub fn predict_unclamped(&self, x: &[f64]) -> Result<Prediction, GpError> {
        if x.len() != self.dim() {
            return Err(GpError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let signal = self.hyper.signal_variance();
        let mut v: Vec<f64> = (0..self.data.len())
            .map(|i| se_eval(self.data.input(i), x, &self.inv_sq, signal))
            .collect();
        let mean = self.mean_shift + v.iter().zip(&self.alpha).map(|(k, a)| k * a).sum::<f64>();
        self.factor.solve_lower_in_place(&mut v);
        let variance = signal - v.iter().map(|w| w * w).sum::<f64>();
        Ok(Prediction { mean, variance })
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, GpError> {
        let mut p = self.predict_unclamped(x)?;
        p.variance = p.variance.max(0.0);
        Ok(p)
    }

    /// Adds one observation and refactorizes. With `retrain`, hyperparameters
    /// are re-optimized starting from the current values plus one random start.
    pub fn augment(
        &self,
        x: &[f64],
        y: f64,
        retrain: Option<&TrainOptions>,
    ) -> Result<GpModel, GpError> {
        let mut data = self.data.clone();
        data.push(x, y)?;
        let hyper = match retrain {
            Some(opts) => {
                let opts = TrainOptions {
                    restarts: 1,
                    ..opts.clone()
                };
                train_with_warm_start(&data, &opts, Some(&self.hyper))?
            }
            None => self.hyper.clone(),
        };
        GpModel::fit(data, hyper)
    }
}

/// `log p(Y | X, θ)` on mean-centered targets.
pub fn log_marginal_likelihood(data: &Dataset, hyper: &KernelHyperparams) -> Result<f64, GpError> {
    check_dims(data, hyper)?;
    let k = noisy_kernel_matrix(data, hyper);
    let factor = cholesky_spd(&k)?;
    let (_, centered) = data.centered_targets();
    Ok(lml_from_factor(&factor, &centered))
}

fn lml_from_factor(factor: &CholFactor, centered: &[f64]) -> f64 {
    let mut w = centered.to_vec();
    factor.solve_lower_in_place(&mut w);
    let fit: f64 = w.iter().map(|v| v * v).sum();
    -0.5 * (fit + factor.log_det() + centered.len() as f64 * LN_2PI)
}

fn lml_value_and_gradient(
    data: &Dataset,
    hyper: &KernelHyperparams,
) -> Result<(f64, Vec<f64>), GpError> {
    check_dims(data, hyper)?;
    let n = data.len();
    let d = data.dim();
    let k = noisy_kernel_matrix(data, hyper);
    let factor = cholesky_spd(&k)?;
    let (_, centered) = data.centered_targets();
    let value = lml_from_factor(&factor, &centered);
    let alpha = solve_chol(&factor, &centered)?;
    let kinv = factor.inverse();
    let noise = hyper.noise_variance();
    let inv_sq = hyper.inv_sq_lengthscales();

    let mut grad = vec![0.0; d + 2];
    for i in 0..n {
        let xi = data.input(i);
        for j in 0..=i {
            // W_ij = α_i α_j − (K_σ⁻¹)_ij; off-diagonal pairs count twice.
            let w = alpha[i] * alpha[j] - kinv.get(i, j);
            let mult = if i == j { 0.5 } else { 1.0 };
            let kf = if i == j {
                k.get(i, i) - noise
            } else {
                k.get(i, j)
            };
            let wk = mult * w * kf;
            grad[d] += wk;
            if i != j {
                let xj = data.input(j);
                for l in 0..d {
                    let diff = xi[l] - xj[l];
                    grad[l] += wk * diff * diff * inv_sq[l];
                }
            } else {
                grad[d + 1] += mult * w * noise;
            }
        }
    }
    Ok((value, grad))
}

/// Analytic gradient of the log-marginal likelihood with respect to
/// `[log ℓ_1..d, log σ_f², log σ_ε²]`.
pub fn lml_gradient(data: &Dataset, hyper: &KernelHyperparams) -> Result<Vec<f64>, GpError> {
    lml_value_and_gradient(data, hyper).map(|(_, g)| g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Convergence threshold on the sup-norm of the projected gradient.
    pub grad_tol: f64,
    /// Per-coordinate search ranges used to place initial lengthscales; the
    /// data spread is used when absent.
    pub scales: Option<Vec<f64>>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            restarts: 3,
            seed: 0,
            max_iters: 200,
            grad_tol: 1e-5,
            scales: None,
        }
    }
}

impl TrainOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_scales(mut self, scales: Vec<f64>) -> Self {
        self.scales = Some(scales);
        self
    }
}

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
/// Largest change of any log-hyperparameter in one trial step.
const MAX_LOG_STEP: f64 = 2.0;

/// Box in log-hyperparameter space the ascent is projected onto.
struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBox {
    fn for_data(data: &Dataset, scales: &[f64]) -> Self {
        let var = reference_variance(data);
        let floor = noise_floor(data);
        let mut lower: Vec<f64> = scales.iter().map(|s| (1e-3 * s).ln()).collect();
        let mut upper: Vec<f64> = scales.iter().map(|s| (1e3 * s).ln()).collect();
        lower.push(floor.ln());
        upper.push((1e4 * var).ln());
        lower.push(floor.ln());
        upper.push((10.0 * var).ln());
        Self { lower, upper }
    }

    fn project(&self, theta: &mut [f64]) {
        for ((t, lo), hi) in theta.iter_mut().zip(&self.lower).zip(&self.upper) {
            *t = t.clamp(*lo, *hi);
        }
    }

    /// Sup-norm of the gradient with components that push against an active
    /// bound removed.
    fn projected_grad_norm(&self, theta: &[f64], grad: &[f64]) -> f64 {
        theta
            .iter()
            .zip(grad)
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((t, g), (lo, hi))| {
                if (*t <= *lo && *g < 0.0) || (*t >= *hi && *g > 0.0) {
                    0.0
                } else {
                    g.abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

fn reference_variance(data: &Dataset) -> f64 {
    let v = data.target_variance();
    if v > 1e-300 {
        v
    } else {
        1.0
    }
}

/// Lower bound applied to the noise (and signal) variance during training.
pub fn noise_floor(data: &Dataset) -> f64 {
    (1e-8 * reference_variance(data)).max(1e-8)
}

fn coordinate_scales(data: &Dataset, opts: &TrainOptions) -> Vec<f64> {
    if let Some(s) = &opts.scales {
        return s.iter().map(|v| if *v > 0.0 { *v } else { 1.0 }).collect();
    }
    (0..data.dim())
        .map(|j| {
            let (lo, hi) = data
                .inputs()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(x[j]), hi.max(x[j]))
                });
            let r = hi - lo;
            if r > 0.0 {
                r
            } else {
                1.0
            }
        })
        .collect()
}

fn random_start(data: &Dataset, scales: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let var = reference_variance(data);
    let mut theta: Vec<f64> = scales
        .iter()
        .map(|s| rng.random_range((0.1 * s).ln()..=(2.0 * s).ln()))
        .collect();
    theta.push(var.ln());
    theta.push((1e-2 * var).ln());
    theta
}

struct AscentResult {
    theta: Vec<f64>,
    value: f64,
}

fn lml_at(data: &Dataset, theta: &[f64]) -> f64 {
    log_marginal_likelihood(data, &KernelHyperparams::from_slice(theta))
        .ok()
        .filter(|v| v.is_finite())
        .unwrap_or(f64::NEG_INFINITY)
}

/// Projected gradient ascent with Armijo backtracking. The first trial step
/// of each iteration is a Barzilai-Borwein estimate.
fn ascend(
    data: &Dataset,
    start: Vec<f64>,
    bounds: &SearchBox,
    opts: &TrainOptions,
) -> AscentResult {
    let mut theta = start;
    bounds.project(&mut theta);
    let (mut value, mut grad) =
        match lml_value_and_gradient(data, &KernelHyperparams::from_slice(&theta)) {
            Ok(vg) if vg.0.is_finite() => vg,
            _ => {
                return AscentResult {
                    theta,
                    value: f64::NEG_INFINITY,
                }
            }
        };
    let mut step: f64 = 1.0;
    for _ in 0..opts.max_iters {
        let gnorm = bounds.projected_grad_norm(&theta, &grad);
        if gnorm < opts.grad_tol {
            break;
        }
        let mut t = step.min(MAX_LOG_STEP / gnorm);
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let mut cand: Vec<f64> = theta.iter().zip(&grad).map(|(a, g)| a + t * g).collect();
            bounds.project(&mut cand);
            let gain: f64 = cand
                .iter()
                .zip(&theta)
                .zip(&grad)
                .map(|((c, a), g)| (c - a) * g)
                .sum();
            if gain <= 0.0 {
                break;
            }
            let v = lml_at(data, &cand);
            if v >= value + ARMIJO_C * gain {
                accepted = Some((cand, v));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, _)) = accepted else { break };
        let Ok((new_value, new_grad)) =
            lml_value_and_gradient(data, &KernelHyperparams::from_slice(&cand))
        else {
            break;
        };
        let s: Vec<f64> = cand.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let sy: f64 = s
            .iter()
            .zip(new_grad.iter().zip(&grad))
            .map(|(si, (gn, go))| si * (gn - go))
            .sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        // Ascent on a locally concave function has s·Δg < 0.
        step = if sy < 0.0 {
            (ss / -sy).clamp(1e-10, 1e6)
        } else {
            t * 2.0
        };
        theta = cand;
        value = new_value;
        grad = new_grad;
    }
    AscentResult { theta, value }
}

fn train_with_warm_start(
    data: &Dataset,
    opts: &TrainOptions,
    warm: Option<&KernelHyperparams>,
) -> Result<KernelHyperparams, GpError> {
    if data.len() < 2 {
        return Err(GpError::TooFewPoints {
            needed: 2,
            have: data.len(),
        });
    }
    let scales = coordinate_scales(data, opts);
    let bounds = SearchBox::for_data(data, &scales);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some(w) = warm {
        starts.push(w.to_vec());
    }
    for _ in 0..opts.restarts.max(1) {
        starts.push(random_start(data, &scales, &mut rng));
    }

    let mut best: Option<AscentResult> = None;
    for start in starts {
        let r = ascend(data, start, &bounds, opts);
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one start");
    if !best.value.is_finite() {
        // Every start failed to factorize; fall back to the heaviest noise.
        let mut theta = random_start(data, &scales, &mut ChaCha8Rng::seed_from_u64(opts.seed));
        let d = data.dim();
        theta[d + 1] = bounds.upper[d + 1];
        return Ok(KernelHyperparams::from_slice(&theta));
    }
    Ok(KernelHyperparams::from_slice(&best.theta))
}

/// Maximizes the log-marginal likelihood from `opts.restarts` random starts
/// and returns the best hyperparameters found.
pub fn train_hyperparams(
    data: &Dataset,
    opts: &TrainOptions,
) -> Result<KernelHyperparams, GpError> {
    train_with_warm_start(data, opts, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp1(l: f64, sf: f64, sn: f64) -> KernelHyperparams {
        KernelHyperparams::new(&[l], sf, sn)
    }

    #[test]
    fn kernel_zero_distance_is_signal_variance() {
        let h = KernelHyperparams::new(&[0.7, 2.0], 3.5, 0.1);
        let k = se_kernel(&[0.3, -1.0], &[0.3, -1.0], &h).unwrap();
        assert!((k - 3.5).abs() < 1e-14);
    }

    #[test]
    fn kernel_long_lengthscale_limit() {
        let h = KernelHyperparams::new(&[1e8, 1e8], 2.0, 0.1);
        let k = se_kernel(&[0.0, 5.0], &[3.0, -4.0], &h).unwrap();
        assert!((k - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_unit_distance() {
        let k = se_kernel(&[0.0], &[1.0], &hp1(1.0, 1.0, 0.1)).unwrap();
        assert!((k - (-0.5f64).exp()).abs() < 1e-15);
        assert!((k - 0.6065).abs() < 1e-4);
    }

    #[test]
    fn kernel_dimension_mismatch() {
        assert!(matches!(
            se_kernel(&[0.0, 1.0], &[1.0], &hp1(1.0, 1.0, 0.1)),
            Err(GpError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_point_alpha_is_zero() {
        let ds = Dataset::new(vec![vec![0.4]], vec![7.0]).unwrap();
        let m = GpModel::fit(ds, hp1(1.0, 1.0, 0.01)).unwrap();
        assert_eq!(m.mean_shift(), 7.0);
        assert_eq!(m.alpha(), &[0.0]);
    }

    #[test]
    fn duplicate_inputs_fit() {
        let ds = Dataset::new(vec![vec![0.5], vec![0.5]], vec![1.0, 2.0]).unwrap();
        let m = GpModel::fit(ds, hp1(1.0, 1.0, 0.01)).unwrap();
        let p = m.predict(&[0.5]).unwrap();
        assert!((p.mean - 1.5).abs() < 1e-2);
    }

    #[test]
    fn interpolates_with_tiny_noise() {
        let ds = Dataset::new(vec![vec![0.0], vec![1.0], vec![2.5]], vec![1.0, -2.0, 0.5]).unwrap();
        let m = GpModel::fit(ds, hp1(1.0, 1.0, 1e-10)).unwrap();
        let p = m.predict(&[1.0]).unwrap();
        assert!((p.mean + 2.0).abs() < 1e-6);
        assert!(p.variance < 1e-8);
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let ds = Dataset::new(vec![vec![0.0], vec![1.0]], vec![3.0, 5.0]).unwrap();
        let m = GpModel::fit(ds, hp1(0.5, 2.0, 1e-4)).unwrap();
        let p = m.predict(&[100.0]).unwrap();
        assert!((p.mean - 4.0).abs() < 1e-12);
        assert!((p.variance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lml_single_point_scalar_formula() {
        let ds = Dataset::new(vec![vec![0.0]], vec![3.0]).unwrap();
        let v = log_marginal_likelihood(&ds, &hp1(1.0, 1.0, 1e-12)).unwrap();
        let expect = -0.5 * LN_2PI - 0.5 * (1.0f64 + 1e-12).ln();
        assert!((v - expect).abs() < 1e-12);
        assert!((v + 0.9189).abs() < 1e-4);
    }

    #[test]
    fn zero_targets_gradient_is_trace_term_only() {
        let ds = Dataset::new(
            vec![
                vec![0.0, 1.0],
                vec![0.5, 0.2],
                vec![1.0, -0.3],
                vec![0.1, 0.9],
            ],
            vec![2.0; 4],
        )
        .unwrap();
        let h = KernelHyperparams::new(&[0.8, 1.3], 1.5, 0.05);
        let g = lml_gradient(&ds, &h).unwrap();
        // Oracle: −½ tr(K_σ⁻¹ ∂K_σ/∂θ) built entrywise.
        let k = noisy_kernel_matrix(&ds, &h);
        let kinv = cholesky_spd(&k).unwrap().inverse();
        let n = ds.len();
        let mut expect = vec![0.0; 4];
        for i in 0..n {
            for j in 0..n {
                let kf = se_kernel(ds.input(i), ds.input(j), &h).unwrap();
                for l in 0..2 {
                    let diff = ds.input(i)[l] - ds.input(j)[l];
                    expect[l] -= 0.5 * kinv.get(j, i) * kf * diff * diff / h.lengthscale(l).powi(2);
                }
                expect[2] -= 0.5 * kinv.get(j, i) * kf;
            }
            expect[3] -= 0.5 * kinv.get(i, i) * h.noise_variance();
        }
        for (a, b) in g.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn augment_without_retrain_keeps_hyper() {
        let ds = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0.0, 1.0]).unwrap();
        let m = GpModel::fit(ds, hp1(1.0, 1.0, 1e-6)).unwrap();
        let m2 = m.augment(&[2.0], 4.0, None).unwrap();
        assert_eq!(m2.len(), 3);
        assert_eq!(m.len(), 2);
        assert_eq!(m2.hyper(), m.hyper());
        assert!((m2.predict(&[2.0]).unwrap().mean - 4.0).abs() < 1e-3);
    }

    #[test]
    fn augment_with_retrain_changes_hyper() {
        let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 * 0.4]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * x[0]).sin()).collect();
        let m = GpModel::fit(Dataset::new(xs, ys).unwrap(), hp1(5.0, 0.1, 0.5)).unwrap();
        let m2 = m
            .augment(&[3.3], (6.6f64).sin(), Some(&TrainOptions::default()))
            .unwrap();
        assert_ne!(m2.hyper(), m.hyper());
        let before = log_marginal_likelihood(m2.data(), m.hyper()).unwrap();
        let after = log_marginal_likelihood(m2.data(), m2.hyper()).unwrap();
        assert!(after >= before);
    }

    #[test]
    fn project_keeps_targets() {
        let ds = Dataset::new(
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
            vec![0.1, 0.2],
        )
        .unwrap();
        let p = ds.project(&[0, 2]);
        assert_eq!(p.dim(), 2);
        assert_eq!(p.input(1), &[4.0, 6.0]);
        assert_eq!(p.targets(), ds.targets());
    }

    #[test]
    fn non_finite_rejected() {
        let mut ds = Dataset::empty(1);
        assert_eq!(ds.push(&[f64::NAN], 1.0), Err(GpError::NonFinite));
        assert_eq!(ds.push(&[0.0], f64::INFINITY), Err(GpError::NonFinite));
    }
}
