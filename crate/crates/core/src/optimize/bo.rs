use std::time::Instant;

use super::{
    derive_seed, design_rng, elapsed_ms, timed_design, Algorithm, Incumbent, IterationRecord,
    OptimizeError, RunConfig, RunResult, RunStatus,
};
use crate::acquisition::AcquisitionContext;
use crate::direct::{direct_minimize, Bounds};
use crate::gp::{train_hyperparams, GpModel};

/// Tag mixed into training seeds of the single BO surrogate.
const BO_SEED_TAG: u64 = u64::MAX;

/// Classical BO: one GP over every observation, Expected Improvement
/// minimized by DIRECT over the full box, `max_iter` evaluations after the
/// initial design.
pub fn run_bo<F>(
    mut objective: F,
    bounds: &Bounds,
    config: &RunConfig,
) -> Result<RunResult, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate_common(bounds.dim())?;
    let started = Instant::now();
    let (design, design_records) = timed_design(
        &mut objective,
        bounds,
        config.n_init,
        &mut design_rng(config.seed),
    )?;
    let mut incumbent = Incumbent::from_dataset(&design);

    let scales = bounds.ranges();
    let opts = config.train_options(derive_seed(config.seed, BO_SEED_TAG, 0), scales.clone());
    let hyper = train_hyperparams(&design, &opts)?;
    let mut model = GpModel::fit(design, hyper)?;

    let mut records = Vec::with_capacity(config.max_iter);
    let mut status = RunStatus::Completed;
    for i in 0..config.max_iter {
        let t_iter = Instant::now();
        let ctx = AcquisitionContext::new(&model, incumbent.y);
        let proposal = direct_minimize(ctx.objective(), bounds, &config.direct)?;
        let x = proposal.x_best;

        let t_eval = Instant::now();
        let y = objective(&x);
        let eval_ms = elapsed_ms(t_eval);
        if !y.is_finite() {
            log::error!("bo: objective returned {y} at iteration {i}; aborting");
            status = RunStatus::Aborted {
                reason: format!("non-finite objective {y} at {x:?}"),
            };
            break;
        }

        let augments = i + 1;
        let retrain = augments.is_multiple_of(config.retrain_period).then(|| {
            config.train_options(
                derive_seed(config.seed, BO_SEED_TAG, augments as u64),
                scales.clone(),
            )
        });
        model = model.augment(&x, y, retrain.as_ref())?;
        incumbent.offer(&x, y);

        records.push(IterationRecord {
            iter: config.n_init + i,
            subset: None,
            x,
            y,
            y_best: incumbent.y,
            wall_time_ms: elapsed_ms(t_iter),
            eval_time_ms: eval_ms,
            gp_size: model.len(),
        });
        log::debug!("bo iter {i}: y = {y:.6e}, best = {:.6e}", incumbent.y);
    }

    Ok(RunResult {
        algorithm: Algorithm::Bo,
        design: design_records,
        records,
        incumbent,
        total_time_ms: elapsed_ms(started),
        gp_count: 1,
        status,
    })
}
