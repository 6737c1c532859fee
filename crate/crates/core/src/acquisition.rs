//! Expected Improvement for minimization.

use crate::gp::{GpError, GpModel};
use crate::numerics::{std_normal_cdf, std_normal_pdf};

/// Posterior standard deviations below this are treated as zero.
pub const DEGENERATE_SIGMA: f64 = 1e-12;

/// A surrogate paired with the incumbent value improvements are measured
/// against.
#[derive(Debug, Clone, Copy)]
pub struct AcquisitionContext<'a> {
    pub model: &'a GpModel,
    pub y_best: f64,
}

impl<'a> AcquisitionContext<'a> {
    pub fn new(model: &'a GpModel, y_best: f64) -> Self {
        debug_assert!(y_best.is_finite());
        Self { model, y_best }
    }

    pub fn expected_improvement(&self, x: &[f64]) -> Result<f64, GpError> {
        let p = self.model.predict(x)?;
        Ok(ei_closed_form(p.mean, p.variance.sqrt(), self.y_best))
    }

    /// `x ↦ −EI(x)`, the form handed to a minimizing inner solver. Inputs of
    /// the wrong dimension score zero improvement.
    pub fn objective(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        move |x| -self.expected_improvement(x).unwrap_or(0.0)
    }
}

/// `E[max(y_best − f, 0)]` for `f ~ N(mean, sigma²)`.
pub fn ei_closed_form(mean: f64, sigma: f64, y_best: f64) -> f64 {
    let improvement = y_best - mean;
    if sigma < DEGENERATE_SIGMA {
        return improvement.max(0.0);
    }
    let z = improvement / sigma;
    (improvement * std_normal_cdf(z) + sigma * std_normal_pdf(z)).max(0.0)
}

pub fn expected_improvement(ctx: &AcquisitionContext<'_>, x: &[f64]) -> Result<f64, GpError> {
    ctx.expected_improvement(x)
}
