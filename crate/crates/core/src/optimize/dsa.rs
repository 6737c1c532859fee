use std::collections::BTreeMap;
use std::time::Instant;

use super::{
    algorithm_rng, derive_seed, design_rng, elapsed_ms, timed_design, Algorithm, Incumbent,
    IterationRecord, OptimizeError, RunConfig, RunResult, RunStatus,
};
use crate::acquisition::AcquisitionContext;
use crate::direct::{direct_minimize, Bounds, DirectConfig};
use crate::gp::{train_hyperparams, Dataset, GpModel, TrainOptions};
use crate::scheduler::{
    compute_dimension_probabilities, sample_subset, DimensionSubset, ProbabilityVector, SubsetKey,
};
use rand_chacha::ChaCha8Rng;

/// Resampling attempts before a planner waits on a checked-out GP.
const MAX_RESAMPLES: usize = 10;

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub subset: DimensionSubset,
    /// `None` while the model is checked out to a worker.
    pub model: Option<GpModel>,
    pub augment_count: usize,
}

/// Subspace GPs keyed by their (unordered) coordinate subset.
#[derive(Debug, Clone, Default)]
pub struct GpRegistry {
    entries: BTreeMap<SubsetKey, RegistryEntry>,
}

impl GpRegistry {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &SubsetKey) -> Option<&RegistryEntry> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&SubsetKey, &RegistryEntry)> {
        self.entries.iter()
    }

    pub fn total_augments(&self) -> usize {
        self.entries.values().map(|e| e.augment_count).sum()
    }

    fn is_checked_out(&self, key: &SubsetKey) -> bool {
        self.entries.get(key).is_some_and(|e| e.model.is_none())
    }
}

pub(crate) enum ModelSource {
    Existing(GpModel),
    Spawn { data: Dataset, opts: TrainOptions },
}

/// Work for one iteration: fetch or spawn `GP_Z`, then minimize −EI over the
/// `Z` sub-box. Runs without access to the objective.
pub(crate) struct Task {
    pub key: SubsetKey,
    pub subset: DimensionSubset,
    pub source: ModelSource,
    pub y_best: f64,
    pub sub_bounds: Bounds,
    pub direct: DirectConfig,
    pub planned_at: Instant,
}

pub(crate) struct Proposal {
    pub key: SubsetKey,
    pub subset: DimensionSubset,
    pub model: GpModel,
    pub x_sub: Vec<f64>,
    pub planned_at: Instant,
}

pub(crate) fn solve(task: Task) -> Result<Proposal, OptimizeError> {
    let model = match task.source {
        ModelSource::Existing(m) => m,
        ModelSource::Spawn { data, opts } => {
            let hyper = train_hyperparams(&data, &opts)?;
            GpModel::fit(data, hyper)?
        }
    };
    let ctx = AcquisitionContext::new(&model, task.y_best);
    let r = direct_minimize(ctx.objective(), &task.sub_bounds, &task.direct)?;
    Ok(Proposal {
        key: task.key,
        subset: task.subset,
        x_sub: r.x_best,
        model,
        planned_at: task.planned_at,
    })
}

pub(crate) enum Plan {
    Ready(Task),
    /// Every sample hit a checked-out GP; wait for it and plan again.
    Blocked,
}

pub(crate) enum Commit {
    Continue,
    Aborted,
}

/// Manager-side DSA state: observations, incumbent, scheduling weights and
/// the registry. Planning and committing happen here; [`solve`] is the only
/// step that may run elsewhere.
pub(crate) struct DsaEngine<'c> {
    config: &'c RunConfig,
    bounds: &'c Bounds,
    design: Dataset,
    design_records: Vec<IterationRecord>,
    observed: Vec<Vec<f64>>,
    incumbent: Incumbent,
    probabilities: ProbabilityVector,
    registry: GpRegistry,
    rng: ChaCha8Rng,
    records: Vec<IterationRecord>,
    planned: usize,
    started: Instant,
    status: RunStatus,
}

impl<'c> DsaEngine<'c> {
    pub fn new<F: FnMut(&[f64]) -> f64>(
        objective: &mut F,
        bounds: &'c Bounds,
        config: &'c RunConfig,
    ) -> Result<Self, OptimizeError> {
        config.validate(bounds.dim())?;
        let started = Instant::now();
        let (design, design_records) = timed_design(
            objective,
            bounds,
            config.n_init,
            &mut design_rng(config.seed),
        )?;
        let incumbent = Incumbent::from_dataset(&design);
        let observed = design.inputs().map(<[f64]>::to_vec).collect();
        Ok(Self {
            config,
            bounds,
            design,
            design_records,
            observed,
            incumbent,
            probabilities: ProbabilityVector::uniform(bounds.dim()),
            registry: GpRegistry::default(),
            rng: algorithm_rng(config.seed),
            records: Vec::with_capacity(config.max_iter),
            planned: 0,
            started,
            status: RunStatus::Completed,
        })
    }

    pub fn planned(&self) -> usize {
        self.planned
    }

    fn refresh_probabilities(&mut self) {
        self.probabilities =
            match compute_dimension_probabilities(&self.observed, self.config.floor_eps) {
                Ok(w) => w.probabilities,
                Err(e) => {
                    log::debug!("dsa: keeping uniform scheduling weights ({e})");
                    ProbabilityVector::uniform(self.bounds.dim())
                }
            };
        log::debug!(
            "dsa: scheduling weights {:?}",
            self.probabilities.as_slice()
        );
    }

    pub fn plan(&mut self) -> Plan {
        let planned_at = Instant::now();
        if self.planned.is_multiple_of(self.config.pca_period) {
            self.refresh_probabilities();
        }
        let k = self.config.subset_size;
        let mut subset = sample_subset(&self.probabilities, k, &mut self.rng);
        let mut attempts = 0;
        while self.registry.is_checked_out(&subset.key()) {
            attempts += 1;
            if attempts > MAX_RESAMPLES {
                return Plan::Blocked;
            }
            subset = sample_subset(&self.probabilities, k, &mut self.rng);
        }
        let key = subset.key();
        let sub_bounds = self.bounds.select(subset.dims());
        let source = match self.registry.entries.get_mut(&key) {
            Some(entry) => ModelSource::Existing(entry.model.take().expect("not checked out")),
            None => {
                self.registry.entries.insert(
                    key,
                    RegistryEntry {
                        subset: subset.clone(),
                        model: None,
                        augment_count: 0,
                    },
                );
                ModelSource::Spawn {
                    data: self.design.project(subset.dims()),
                    opts: self.config.train_options(
                        derive_seed(self.config.seed, key.bits(), 0),
                        sub_bounds.ranges(),
                    ),
                }
            }
        };
        self.planned += 1;
        Plan::Ready(Task {
            key,
            subset,
            source,
            y_best: self.incumbent.y,
            sub_bounds,
            direct: self.config.direct,
            planned_at,
        })
    }

    /// Evaluates the proposal clamped onto the incumbent, augments `GP_Z`
    /// and updates the incumbent. `wall_since` marks the start of the
    /// iteration for timing.
    pub fn commit<F: FnMut(&[f64]) -> f64>(
        &mut self,
        proposal: Proposal,
        objective: &mut F,
        wall_since: Instant,
    ) -> Result<Commit, OptimizeError> {
        let Proposal {
            key,
            subset,
            model,
            x_sub,
            ..
        } = proposal;
        let mut x = self.incumbent.x.clone();
        for (&j, v) in subset.dims().iter().zip(&x_sub) {
            x[j] = *v;
        }

        let t_eval = Instant::now();
        let y = objective(&x);
        let eval_ms = elapsed_ms(t_eval);
        let entry = self.registry.entries.get_mut(&key).expect("planned entry");
        if !y.is_finite() {
            log::error!("dsa: objective returned {y}; aborting");
            entry.model = Some(model);
            self.status = RunStatus::Aborted {
                reason: format!("non-finite objective {y} at {x:?}"),
            };
            return Ok(Commit::Aborted);
        }

        entry.augment_count += 1;
        let count = entry.augment_count;
        let retrain = count.is_multiple_of(self.config.retrain_period).then(|| {
            self.config.train_options(
                derive_seed(self.config.seed, key.bits(), count as u64),
                self.bounds.select(subset.dims()).ranges(),
            )
        });
        let model = model.augment(&x_sub, y, retrain.as_ref())?;
        let gp_size = model.len();
        entry.model = Some(model);

        self.incumbent.offer(&x, y);
        self.observed.push(x.clone());
        let iter = self.config.n_init + self.records.len();
        log::debug!(
            "dsa iter {iter}: Z = {subset}, y = {y:.6e}, best = {:.6e}",
            self.incumbent.y
        );
        self.records.push(IterationRecord {
            iter,
            subset: Some(subset),
            x,
            y,
            y_best: self.incumbent.y,
            wall_time_ms: elapsed_ms(wall_since),
            eval_time_ms: eval_ms,
            gp_size,
        });
        Ok(Commit::Continue)
    }

    pub fn finish(self, algorithm: Algorithm) -> (RunResult, GpRegistry) {
        let result = RunResult {
            algorithm,
            design: self.design_records,
            records: self.records,
            incumbent: self.incumbent,
            total_time_ms: elapsed_ms(self.started),
            gp_count: self.registry.len(),
            status: self.status,
        };
        (result, self.registry)
    }
}

/// Dimension-scheduled BO. Each iteration samples a coordinate subset `Z`
/// from PCA-derived weights, minimizes −EI of `GP_Z` over the `Z` sub-box
/// with the remaining coordinates clamped to the incumbent, evaluates, and
/// augments only `GP_Z`.
pub fn run_dsa<F>(
    objective: F,
    bounds: &Bounds,
    config: &RunConfig,
) -> Result<RunResult, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    run_dsa_with_registry(objective, bounds, config).map(|(r, _)| r)
}

/// [`run_dsa`], also returning the final GP registry.
pub fn run_dsa_with_registry<F>(
    mut objective: F,
    bounds: &Bounds,
    config: &RunConfig,
) -> Result<(RunResult, GpRegistry), OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut engine = DsaEngine::new(&mut objective, bounds, config)?;
    while engine.planned() < config.max_iter {
        let Plan::Ready(task) = engine.plan() else {
            unreachable!("sequential planner never has a GP checked out");
        };
        let since = task.planned_at;
        let proposal = solve(task)?;
        if let Commit::Aborted = engine.commit(proposal, &mut objective, since)? {
            break;
        }
    }
    Ok(engine.finish(Algorithm::Dsa))
}
