//! The optimizer loop: sample a mini-batch, fold its gradient into the
//! preconditioner, query the step-size controller, apply the
//! momentum-composed update, and record the trajectory.
//!
//! Update order within a step is fixed: form A_k (already including the
//! current gradient), compute the direction, search the step-size, update the
//! momentum buffer, update the iterate. Mini-batches are sampled with
//! replacement; (seed, config, dataset) fully determine the trajectory.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::momentum::{self, MomentumConfig};
use crate::objective::FiniteSumObjective;
use crate::precond::{PrecondConfig, PreconditionerState};
use crate::step_size::StepSizeController;
use crate::weights::Weights;

/// Which iterate `run` reports as the averaged result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    #[default]
    Last,
    /// Uniform average (1/T) sum_{k=1..T} w_k of the post-step iterates.
    Uniform,
}

/// Initial iterate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitSpec {
    #[default]
    Zeros,
    /// i.i.d. N(0, stddev^2) entries, drawn from a seed-derived stream.
    Normal { stddev: f64 },
}

/// Full specification of a single optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub batch_size: usize,
    pub epochs: usize,
    #[serde(default)]
    pub seed: u64,
    pub precond: PrecondConfig,
    pub controller: StepSizeController,
    #[serde(default = "default_momentum")]
    pub momentum: MomentumConfig,
    #[serde(default)]
    pub averaging: Averaging,
    #[serde(default)]
    pub init: InitSpec,
    /// Iterations at which to snapshot the running uniform average.
    #[serde(default)]
    pub avg_checkpoints: Vec<usize>,
    /// Keep every post-step iterate (needed to measure the iterate radius).
    #[serde(default)]
    pub record_iterates: bool,
}

fn default_momentum() -> MomentumConfig {
    MomentumConfig::None
}

impl RunConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.batch_size == 0 || self.batch_size > n {
            return Err(Error::InvalidConfig(format!(
                "batch size must lie in [1, n={n}], got {}",
                self.batch_size
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        if let InitSpec::Normal { stddev } = self.init {
            if !(stddev > 0.0 && stddev.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "init stddev must be positive, got {stddev}"
                )));
            }
        }
        self.precond.validate()?;
        self.controller.validate()?;
        self.momentum.validate()?;
        Ok(())
    }
}

/// Mutable optimizer state: iterate, momentum buffer, previous iterate (for
/// heavy-ball), previous step-size, iteration counter, and the batch sampler.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub w: Weights,
    pub m: Weights,
    pub w_prev: Weights,
    pub eta_prev: f64,
    pub k: usize,
    rng: ChaCha8Rng,
}

impl OptimizerState {
    /// At k = 0, the momentum buffer is zero and w_prev = w, so the first
    /// heavy-ball step has no momentum.
    pub fn new(w0: Weights, eta0: f64, seed: u64) -> Self {
        let dim = w0.dim();
        OptimizerState {
            m: Weights::zeros(dim),
            w_prev: w0.clone(),
            w: w0,
            eta_prev: eta0,
            k: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Sample a batch of `b` component indices with replacement.
    pub fn sample_batch(&mut self, b: usize, n: usize) -> Vec<usize> {
        (0..b).map(|_| self.rng.random_range(0..n)).collect()
    }
}

/// Per-iteration log entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    /// Batch mean loss at w_k, before the step.
    pub batch_loss: f64,
    pub eta: f64,
    /// Backtracking start point (line-search controllers only).
    pub eta_start: Option<f64>,
    /// Effective upper bound of the step-size query.
    pub eta_bound: f64,
    pub grad_norm_sq: f64,
    pub precond_norm_sq: f64,
    pub backtracks: usize,
    /// Search exhausted its backtracking budget.
    pub warning: bool,
    pub a_min: f64,
    pub a_max: f64,
    pub trace_a: f64,
    /// min_j (A_k - A_{k-1})_j; nonnegative on every step iff the
    /// preconditioner is entrywise non-decreasing.
    pub min_diag_diff: f64,
}

/// Everything `run` knows about itself, stored alongside the records so
/// post-hoc checks can reconstruct the applicable bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub n: usize,
    pub dim: usize,
    pub steps_per_epoch: usize,
    /// Analytic L_max when the objective knows it.
    pub l_max: Option<f64>,
    pub config: RunConfig,
}

/// Running uniform average snapshot at iteration `iter`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedCheckpoint {
    pub iter: usize,
    pub weights: Weights,
}

/// Per-iteration log consumed by the analysis module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub meta: TrajectoryMeta,
    pub steps: Vec<StepRecord>,
    /// Full train loss, evaluated once at the end of each epoch.
    pub epoch_train_loss: Vec<f64>,
    pub averaged_checkpoints: Vec<AveragedCheckpoint>,
    /// Post-step iterates, kept only when the config asks for them.
    pub iterates: Option<Vec<Weights>>,
}

/// Output of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_weights: Weights,
    pub averaged_weights: Weights,
    pub trajectory: TrajectoryRecord,
}

/// Execute one optimizer step on the given batch. The preconditioner is
/// updated with g_k before the step-size query.
pub fn step(
    state: &mut OptimizerState,
    obj: &dyn FiniteSumObjective,
    batch: &[usize],
    precond: &mut PreconditionerState,
    ctrl: &StepSizeController,
    mom: &MomentumConfig,
) -> Result<StepRecord> {
    let n = obj.num_components();
    if batch.is_empty() {
        return Err(Error::InvalidInput("batch must be nonempty".into()));
    }
    if let Some(&bad) = batch.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidInput(format!(
            "batch index {bad} out of range for n = {n}"
        )));
    }
    state.w.check_dim(obj.dim())?;

    let batch_loss = obj.batch_value(batch, &state.w);
    let g = obj.batch_grad(batch, &state.w);
    if !g.all_finite() {
        return Err(Error::NonFinite {
            what: "batch gradient",
            iter: state.k,
        });
    }

    let prev_diag = precond.diag().to_vec();
    precond.update(&g)?;
    let min_diag_diff = precond
        .diag()
        .iter()
        .zip(&prev_diag)
        .map(|(a, p)| a - p)
        .fold(f64::INFINITY, f64::min);

    let selected = ctrl.select(obj, batch, &state.w, &g, precond, state.eta_prev, state.k)?;
    let eta = selected.eta;

    let w_new = match *mom {
        MomentumConfig::None => {
            let dir = precond.apply_inverse(&g)?;
            let mut w = state.w.clone();
            w.add_scaled(-eta, &dir);
            w
        }
        MomentumConfig::MovingAverage { beta } => {
            state.m = momentum::moving_average(&state.m, &g, beta);
            let dir = precond.apply_inverse(&state.m)?;
            let mut w = state.w.clone();
            w.add_scaled(-eta, &dir);
            w
        }
        MomentumConfig::HeavyBall { gamma } => {
            let dir = precond.apply_inverse(&g)?;
            momentum::heavy_ball_update(&state.w, &state.w_prev, eta, &dir, gamma)
        }
    };
    if !w_new.all_finite() {
        return Err(Error::NonFinite {
            what: "iterate",
            iter: state.k,
        });
    }

    let record = StepRecord {
        k: state.k,
        batch_loss,
        eta,
        eta_start: selected.eta_start,
        eta_bound: selected.eta_bound,
        grad_norm_sq: g.norm_sq(),
        precond_norm_sq: precond.precond_norm_sq(&g)?,
        backtracks: selected.backtracks,
        warning: selected.warning,
        a_min: precond.diag_min(),
        a_max: precond.diag_max(),
        trace_a: precond.trace(),
        min_diag_diff,
    };

    state.w_prev = std::mem::replace(&mut state.w, w_new);
    state.eta_prev = eta;
    state.k += 1;
    Ok(record)
}

/// Run the configured optimizer for `epochs * ceil(n / b)` iterations.
pub fn run(obj: &dyn FiniteSumObjective, config: &RunConfig) -> Result<RunOutput> {
    let n = obj.num_components();
    let dim = obj.dim();
    config.validate(n)?;

    let w0 = match config.init {
        InitSpec::Zeros => Weights::zeros(dim),
        InitSpec::Normal { stddev } => {
            // separate stream so batch sampling is unaffected by the init
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
            let normal = rand_distr::Normal::new(0.0, stddev)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            Weights::new((0..dim).map(|_| rng.sample(normal)).collect())
        }
    };

    let mut precond = PreconditionerState::new(config.precond, dim)?;
    let mut state = OptimizerState::new(w0, config.controller.initial_eta(), config.seed);

    let steps_per_epoch = n.div_ceil(config.batch_size);
    let total = config.epochs * steps_per_epoch;

    let mut checkpoints = config.avg_checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let mut next_checkpoint = 0;

    let mut sum_w = Weights::zeros(dim);
    let mut steps = Vec::with_capacity(total);
    let mut epoch_train_loss = Vec::with_capacity(config.epochs);
    let mut averaged_checkpoints = Vec::with_capacity(checkpoints.len());
    let mut iterates = config.record_iterates.then(|| Vec::with_capacity(total));

    for _ in 0..config.epochs {
        for _ in 0..steps_per_epoch {
            let batch = state.sample_batch(config.batch_size, n);
            let record = step(
                &mut state,
                obj,
                &batch,
                &mut precond,
                &config.controller,
                &config.momentum,
            )?;
            steps.push(record);
            sum_w.add_scaled(1.0, &state.w);
            if let Some(list) = iterates.as_mut() {
                list.push(state.w.clone());
            }
            while next_checkpoint < checkpoints.len() && checkpoints[next_checkpoint] == state.k {
                let mut avg = sum_w.clone();
                avg.scale(1.0 / state.k as f64);
                averaged_checkpoints.push(AveragedCheckpoint {
                    iter: state.k,
                    weights: avg,
                });
                next_checkpoint += 1;
            }
        }
        epoch_train_loss.push(obj.full_value(&state.w));
    }

    let averaged_weights = match config.averaging {
        Averaging::Last => state.w.clone(),
        Averaging::Uniform => {
            let mut avg = sum_w;
            avg.scale(1.0 / total as f64);
            avg
        }
    };

    Ok(RunOutput {
        final_weights: state.w,
        averaged_weights,
        trajectory: TrajectoryRecord {
            meta: TrajectoryMeta {
                n,
                dim,
                steps_per_epoch,
                l_max: obj.known_l_max(),
                config: config.clone(),
            },
            steps,
            epoch_train_loss,
            averaged_checkpoints,
            iterates,
        },
    })
}

/// Coordinatewise arithmetic mean of a nonempty iterate list.
pub fn uniform_average(iterates: &[Weights]) -> Result<Weights> {
    let first = iterates
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot average an empty iterate list".into()))?;
    let dim = first.dim();
    let mut sum = Weights::zeros(dim);
    for w in iterates {
        w.check_dim(dim)?;
        sum.add_scaled(1.0, w);
    }
    sum.scale(1.0 / iterates.len() as f64);
    Ok(sum)
}
