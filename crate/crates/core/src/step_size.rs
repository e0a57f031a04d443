//! Step-size controllers: constant values (including theory-prescribed ones),
//! Lipschitz and Armijo backtracking line-searches with reset policies, and
//! stochastic Polyak step-sizes (SPS) with smoothing and conservative caps.
//!
//! The Lipschitz search tests sufficient decrease along the raw gradient
//! (its only job is to estimate local smoothness), while the Armijo search
//! tests along the preconditioned direction A^{-1} g with the matching
//! A^{-1}-norm on the decrease term. Both walk the geometric grid
//! eta_start * gamma_bt^j and return the first accepted candidate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::FiniteSumObjective;
use crate::precond::PreconditionerState;
use crate::weights::Weights;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineSearchMode {
    Lipschitz,
    Armijo,
}

/// Rule for choosing the backtracking start point each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetOption {
    /// Option 0: start from the previous step-size.
    Keep,
    /// Option 1: grow the previous step-size by gamma_rs^{b/n}.
    Grow,
    /// Option 2: restart from eta_max.
    Restart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearchConfig {
    pub mode: LineSearchMode,
    /// Sufficient-decrease parameter, in (0,1).
    #[serde(default = "default_c_ls")]
    pub c: f64,
    #[serde(default = "default_eta_max")]
    pub eta_max: f64,
    /// Backtracking shrink factor, in (0,1).
    #[serde(default = "default_backtrack")]
    pub backtrack_factor: f64,
    #[serde(default = "default_max_backtracks")]
    pub max_backtracks: usize,
    #[serde(default = "default_reset")]
    pub reset: ResetOption,
    /// Growth factor gamma_rs > 1 for the Grow reset option.
    #[serde(default = "default_growth")]
    pub reset_growth: f64,
    /// Enforce eta_k <= eta_{k-1}: the search starts at eta_{k-1} and is
    /// bounded by it.
    #[serde(default)]
    pub conservative: bool,
}

fn default_c_ls() -> f64 {
    0.5
}
fn default_eta_max() -> f64 {
    1e3
}
fn default_backtrack() -> f64 {
    0.5
}
fn default_max_backtracks() -> usize {
    100
}
fn default_reset() -> ResetOption {
    ResetOption::Grow
}
fn default_growth() -> f64 {
    2.0
}

impl LineSearchConfig {
    pub fn new(mode: LineSearchMode) -> Self {
        LineSearchConfig {
            mode,
            c: default_c_ls(),
            eta_max: default_eta_max(),
            backtrack_factor: default_backtrack(),
            max_backtracks: default_max_backtracks(),
            reset: if mode == LineSearchMode::Lipschitz {
                ResetOption::Keep
            } else {
                ResetOption::Grow
            },
            reset_growth: default_growth(),
            conservative: mode == LineSearchMode::Lipschitz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "line-search c must lie in (0,1), got {}",
                self.c
            )));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "backtrack factor must lie in (0,1), got {}",
                self.backtrack_factor
            )));
        }
        if !(self.eta_max > 0.0) {
            return Err(Error::InvalidConfig("eta_max must be positive".into()));
        }
        if self.max_backtracks == 0 {
            return Err(Error::InvalidConfig("max_backtracks must be positive".into()));
        }
        if !(self.reset_growth > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "reset growth must exceed 1, got {}",
                self.reset_growth
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpsMode {
    Plain,
    Armijo,
}

/// Cap on the growth of the Polyak step between iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    Off,
    /// tau = 2^{b/n}, computed from the run's batch size and component count.
    Auto,
    /// Fixed tau >= 1.
    Tau(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsConfig {
    pub mode: SpsMode,
    /// Scaling parameter c > 0. Values above 1 are allowed (the momentum
    /// theory prescribes c = (1+beta)/(1-beta)).
    #[serde(default = "default_c_sps")]
    pub c: f64,
    #[serde(default = "default_eta_max")]
    pub eta_max: f64,
    #[serde(default = "default_smoothing")]
    pub smoothing: Smoothing,
    /// Enforce eta_k <= eta_{k-1} by capping at the previous step-size.
    #[serde(default)]
    pub conservative: bool,
}

fn default_c_sps() -> f64 {
    0.5
}
fn default_smoothing() -> Smoothing {
    Smoothing::Auto
}

impl SpsConfig {
    pub fn new(mode: SpsMode) -> Self {
        SpsConfig {
            mode,
            c: default_c_sps(),
            eta_max: default_eta_max(),
            smoothing: default_smoothing(),
            conservative: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "SPS c must be positive, got {}",
                self.c
            )));
        }
        if !(self.eta_max > 0.0) {
            return Err(Error::InvalidConfig("eta_max must be positive".into()));
        }
        if let Smoothing::Tau(tau) = self.smoothing {
            if !(tau >= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "smoothing tau must be >= 1, got {tau}"
                )));
            }
        }
        Ok(())
    }

    fn tau(&self, batch_size: usize, n: usize) -> Option<f64> {
        match self.smoothing {
            Smoothing::Off => None,
            Smoothing::Auto => Some(2f64.powf(batch_size as f64 / n as f64)),
            Smoothing::Tau(tau) => Some(tau),
        }
    }
}

/// Result of one step-size query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizeOutcome {
    pub eta: f64,
    pub backtracks: usize,
    /// Set when the search exhausted max_backtracks and fell back to the
    /// smallest candidate.
    pub warning: bool,
}

impl StepSizeOutcome {
    fn accepted(eta: f64, backtracks: usize) -> Self {
        StepSizeOutcome {
            eta,
            backtracks,
            warning: false,
        }
    }
}

/// Backtracking search along the raw gradient: returns the first eta on the
/// grid eta_start * gamma_bt^j with
/// f_B(w - eta g) <= f_B(w) - c * eta * ||g||^2.
///
/// A zero gradient accepts eta_start immediately (both sides equal f_B(w)).
pub fn lipschitz_search(
    cfg: &LineSearchConfig,
    obj: &dyn FiniteSumObjective,
    batch: &[usize],
    w: &Weights,
    g: &Weights,
    eta_start: f64,
) -> StepSizeOutcome {
    let f_w = obj.batch_value(batch, w);
    let norm_sq = g.norm_sq();
    backtrack(cfg, eta_start, |eta| {
        let mut trial = w.clone();
        trial.add_scaled(-eta, g);
        obj.batch_value(batch, &trial) <= f_w - cfg.c * eta * norm_sq
    })
}

/// Backtracking search along the preconditioned direction: returns the first
/// eta on the grid with
/// f_B(w - eta A^{-1} g) <= f_B(w) - c * eta * ||g||^2_{A^{-1}}.
pub fn armijo_search(
    cfg: &LineSearchConfig,
    obj: &dyn FiniteSumObjective,
    batch: &[usize],
    w: &Weights,
    g: &Weights,
    precond: &PreconditionerState,
    eta_start: f64,
) -> Result<StepSizeOutcome> {
    let f_w = obj.batch_value(batch, w);
    let dir = precond.apply_inverse(g)?;
    let norm_sq = precond.precond_norm_sq(g)?;
    Ok(backtrack(cfg, eta_start, |eta| {
        let mut trial = w.clone();
        trial.add_scaled(-eta, &dir);
        obj.batch_value(batch, &trial) <= f_w - cfg.c * eta * norm_sq
    }))
}

fn backtrack(cfg: &LineSearchConfig, eta_start: f64, accepts: impl Fn(f64) -> bool) -> StepSizeOutcome {
    let mut eta = eta_start;
    for j in 0..=cfg.max_backtracks {
        if accepts(eta) {
            return StepSizeOutcome::accepted(eta, j);
        }
        if j < cfg.max_backtracks {
            eta *= cfg.backtrack_factor;
        }
    }
    // exhausted: fall back to the smallest candidate tried
    StepSizeOutcome {
        eta,
        backtracks: cfg.max_backtracks,
        warning: true,
    }
}

/// Backtracking start point for iteration k (reset rule):
/// k = 0 -> eta_max; Keep -> eta_prev; Grow -> eta_prev * gamma_rs^{b/n};
/// Restart -> eta_max. The conservative flag forces Keep behavior, capped at
/// eta_prev. Callers that feed a search must additionally cap at eta_max.
pub fn reset_start(cfg: &LineSearchConfig, eta_prev: f64, k: usize, b: usize, n: usize) -> f64 {
    if k == 0 {
        return cfg.eta_max;
    }
    if cfg.conservative {
        return eta_prev;
    }
    match cfg.reset {
        ResetOption::Keep => eta_prev,
        ResetOption::Grow => eta_prev * cfg.reset_growth.powf(b as f64 / n as f64),
        ResetOption::Restart => cfg.eta_max,
    }
}

/// Stochastic Polyak step: eta = min{ (f_B(w) - f_B*) / (c ||g||^2), bound },
/// where the bound is eta_max, tightened to tau * eta_prev under smoothing and
/// to eta_prev in conservative mode.
///
/// A gap within rounding noise of zero (|gap| <= 1e-12 * (1 + |f_B|)) is
/// treated as zero; a genuinely negative gap signals a wrong f* source and is
/// an error. A zero gap with a nonzero gradient yields the smallest positive
/// step so recorded step-sizes stay positive.
pub fn sps_step(
    cfg: &SpsConfig,
    obj: &dyn FiniteSumObjective,
    batch: &[usize],
    w: &Weights,
    g: &Weights,
    eta_prev: f64,
) -> Result<StepSizeOutcome> {
    sps_with_norm(cfg, obj, batch, w, g.norm_sq(), eta_prev, obj.num_components())
}

/// SPS with the preconditioned gradient norm ||g||^2_{A^{-1}} in the
/// denominator.
pub fn armijo_sps_step(
    cfg: &SpsConfig,
    obj: &dyn FiniteSumObjective,
    batch: &[usize],
    w: &Weights,
    g: &Weights,
    precond: &PreconditionerState,
    eta_prev: f64,
) -> Result<StepSizeOutcome> {
    let norm_sq = precond.precond_norm_sq(g)?;
    sps_with_norm(cfg, obj, batch, w, norm_sq, eta_prev, obj.num_components())
}

fn sps_with_norm(
    cfg: &SpsConfig,
    obj: &dyn FiniteSumObjective,
    batch: &[usize],
    w: &Weights,
    norm_sq: f64,
    eta_prev: f64,
    n: usize,
) -> Result<StepSizeOutcome> {
    let bound = sps_bound(cfg, eta_prev, batch.len(), n);
    let f_w = obj.batch_value(batch, w);
    let mut gap = f_w - obj.batch_min(batch);
    if gap < 0.0 {
        if gap >= -1e-12 * (1.0 + f_w.abs()) {
            gap = 0.0;
        } else {
            return Err(Error::NegativeSpsGap { gap });
        }
    }
    let eta = if norm_sq == 0.0 {
        bound
    } else {
        let polyak = gap / (cfg.c * norm_sq);
        polyak.min(bound).max(f64::MIN_POSITIVE)
    };
    Ok(StepSizeOutcome::accepted(eta, 0))
}

pub(crate) fn sps_bound(cfg: &SpsConfig, eta_prev: f64, batch_size: usize, n: usize) -> f64 {
    let mut bound = cfg.eta_max;
    if let Some(tau) = cfg.tau(batch_size, n) {
        bound = bound.min(tau * eta_prev);
    }
    if cfg.conservative {
        bound = bound.min(eta_prev);
    }
    bound
}

/// Theorem whose prescribed constant step-size to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremConstant {
    /// eta = a_min / (2 L_max), the no-momentum constant.
    AmsgradConstant,
    /// eta = (1-beta)/(1+beta) * a_min / (2 L_max).
    AmsgradConstantMomentum,
}

/// Constant step-size prescribed by the named convergence theorem.
pub fn theoretical_constant(theorem: TheoremConstant, l_max: f64, a_min: f64, beta: f64) -> f64 {
    debug_assert!(l_max > 0.0 && a_min > 0.0 && (0.0..1.0).contains(&beta));
    let base = a_min / (2.0 * l_max);
    match theorem {
        TheoremConstant::AmsgradConstant => base,
        TheoremConstant::AmsgradConstantMomentum => (1.0 - beta) / (1.0 + beta) * base,
    }
}

/// A complete step-size policy for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSizeController {
    Constant { eta: f64 },
    LineSearch(LineSearchConfig),
    Sps(SpsConfig),
}

/// Controller output plus the query bookkeeping the trajectory records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedStep {
    pub eta: f64,
    pub backtracks: usize,
    pub warning: bool,
    /// Backtracking start point (line-searches only).
    pub eta_start: Option<f64>,
    /// Effective upper bound of this query (eta_max, possibly tightened by
    /// smoothing or the conservative cap).
    pub eta_bound: f64,
}

impl StepSizeController {
    pub fn validate(&self) -> Result<()> {
        match self {
            StepSizeController::Constant { eta } => {
                if !(eta > &0.0 && eta.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "constant step-size must be positive, got {eta}"
                    )));
                }
                Ok(())
            }
            StepSizeController::LineSearch(cfg) => cfg.validate(),
            StepSizeController::Sps(cfg) => cfg.validate(),
        }
    }

    /// Value of eta_prev before the first step.
    pub fn initial_eta(&self) -> f64 {
        match self {
            StepSizeController::Constant { eta } => *eta,
            StepSizeController::LineSearch(cfg) => cfg.eta_max,
            StepSizeController::Sps(cfg) => cfg.eta_max,
        }
    }

    pub fn is_conservative(&self) -> bool {
        match self {
            StepSizeController::Constant { .. } => false,
            StepSizeController::LineSearch(cfg) => cfg.conservative,
            StepSizeController::Sps(cfg) => cfg.conservative,
        }
    }

    /// Select the step-size for iteration k. The preconditioner must already
    /// include the current gradient.
    pub fn select(
        &self,
        obj: &dyn FiniteSumObjective,
        batch: &[usize],
        w: &Weights,
        g: &Weights,
        precond: &PreconditionerState,
        eta_prev: f64,
        k: usize,
    ) -> Result<SelectedStep> {
        match self {
            StepSizeController::Constant { eta } => Ok(SelectedStep {
                eta: *eta,
                backtracks: 0,
                warning: false,
                eta_start: None,
                eta_bound: *eta,
            }),
            StepSizeController::LineSearch(cfg) => {
                let b = batch.len();
                let n = obj.num_components();
                let start = reset_start(cfg, eta_prev, k, b, n).min(cfg.eta_max);
                let outcome = match cfg.mode {
                    LineSearchMode::Lipschitz => lipschitz_search(cfg, obj, batch, w, g, start),
                    LineSearchMode::Armijo => {
                        armijo_search(cfg, obj, batch, w, g, precond, start)?
                    }
                };
                let bound = if cfg.conservative && k > 0 {
                    eta_prev.min(cfg.eta_max)
                } else {
                    cfg.eta_max
                };
                Ok(SelectedStep {
                    eta: outcome.eta,
                    backtracks: outcome.backtracks,
                    warning: outcome.warning,
                    eta_start: Some(start),
                    eta_bound: bound,
                })
            }
            StepSizeController::Sps(cfg) => {
                let outcome = match cfg.mode {
                    SpsMode::Plain => sps_step(cfg, obj, batch, w, g, eta_prev)?,
                    SpsMode::Armijo => armijo_sps_step(cfg, obj, batch, w, g, precond, eta_prev)?,
                };
                let bound = sps_bound(cfg, eta_prev, batch.len(), obj.num_components());
                Ok(SelectedStep {
                    eta: outcome.eta,
                    backtracks: 0,
                    warning: false,
                    eta_start: None,
                    eta_bound: bound,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1-D finite sum of quadratics f_i(w) = 0.5 * l_i * (w - c_i)^2.
    pub(crate) struct Quadratics {
        pub curv: Vec<f64>,
        pub center: Vec<f64>,
    }

    impl Quadratics {
        pub fn single(l: f64) -> Self {
            Quadratics {
                curv: vec![l],
                center: vec![0.0],
            }
        }
    }

    impl FiniteSumObjective for Quadratics {
        fn num_components(&self) -> usize {
            self.curv.len()
        }
        fn dim(&self) -> usize {
            1
        }
        fn component_value(&self, i: usize, w: &Weights) -> f64 {
            0.5 * self.curv[i] * (w[0] - self.center[i]).powi(2)
        }
        fn component_grad(&self, i: usize, w: &Weights) -> Weights {
            Weights::new(vec![self.curv[i] * (w[0] - self.center[i])])
        }
    }

    fn ls_config(mode: LineSearchMode, c: f64, eta_max: f64) -> LineSearchConfig {
        let mut cfg = LineSearchConfig::new(mode);
        cfg.c = c;
        cfg.eta_max = eta_max;
        cfg
    }

    #[test]
    fn lipschitz_closed_form_acceptance_region() {
        // f = 0.5 * L * w^2 with L = 2, c = 1/2: acceptance iff eta <= 0.5.
        // Candidates 10, 5, 2.5, 1.25, 0.625, 0.3125 -> 0.3125 with 5 backtracks.
        let obj = Quadratics::single(2.0);
        let cfg = ls_config(LineSearchMode::Lipschitz, 0.5, 10.0);
        let w = Weights::new(vec![1.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = lipschitz_search(&cfg, &obj, &[0], &w, &g, 10.0);
        assert_eq!(out.eta, 0.3125);
        assert_eq!(out.backtracks, 5);
        assert!(!out.warning);
    }

    #[test]
    fn lipschitz_zero_gradient_accepts_start() {
        let obj = Quadratics::single(2.0);
        let cfg = ls_config(LineSearchMode::Lipschitz, 0.5, 10.0);
        let w = Weights::new(vec![0.0]); // at the minimum, g = 0
        let g = obj.batch_grad(&[0], &w);
        let out = lipschitz_search(&cfg, &obj, &[0], &w, &g, 10.0);
        assert_eq!(out.eta, 10.0);
        assert_eq!(out.backtracks, 0);
    }

    #[test]
    fn lipschitz_exhaustion_returns_smallest_candidate_with_warning() {
        let obj = Quadratics::single(2.0);
        let mut cfg = ls_config(LineSearchMode::Lipschitz, 0.5, 10.0);
        cfg.max_backtracks = 3; // grid 10, 5, 2.5, 1.25 all rejected
        let w = Weights::new(vec![1.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = lipschitz_search(&cfg, &obj, &[0], &w, &g, 10.0);
        assert!(out.warning);
        assert_eq!(out.backtracks, 3);
        assert_eq!(out.eta, 1.25);
    }

    #[test]
    fn armijo_identity_matches_lipschitz_bitwise() {
        let obj = Quadratics {
            curv: vec![2.0, 5.0],
            center: vec![0.3, -0.7],
        };
        let cfg = ls_config(LineSearchMode::Armijo, 0.5, 10.0);
        let precond = PreconditionerState::frozen(vec![1.0]).unwrap();
        let w = Weights::new(vec![1.0]);
        let g = obj.batch_grad(&[0, 1], &w);
        let a = armijo_search(&cfg, &obj, &[0, 1], &w, &g, &precond, 10.0).unwrap();
        let l = lipschitz_search(&cfg, &obj, &[0, 1], &w, &g, 10.0);
        assert_eq!(a.eta.to_bits(), l.eta.to_bits());
        assert_eq!(a.backtracks, l.backtracks);
    }

    #[test]
    fn armijo_scalar_closed_form() {
        // f = 0.5 * L * w^2, A = a: acceptance iff eta <= 2(1-c) a / L.
        // L = 2, a = 4, c = 1/2: region eta <= 4/2 = 2; candidates 10, 5, 2.5,
        // 1.25 -> returns 1.25.
        let obj = Quadratics::single(2.0);
        let cfg = ls_config(LineSearchMode::Armijo, 0.5, 10.0);
        let precond = PreconditionerState::frozen(vec![4.0]).unwrap();
        let w = Weights::new(vec![1.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = armijo_search(&cfg, &obj, &[0], &w, &g, &precond, 10.0).unwrap();
        assert_eq!(out.eta, 1.25);
        assert_eq!(out.backtracks, 3);
    }

    #[test]
    fn armijo_zero_gradient_accepts_start() {
        let obj = Quadratics::single(2.0);
        let cfg = ls_config(LineSearchMode::Armijo, 0.5, 10.0);
        let precond = PreconditionerState::frozen(vec![3.0]).unwrap();
        let w = Weights::new(vec![0.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = armijo_search(&cfg, &obj, &[0], &w, &g, &precond, 10.0).unwrap();
        assert_eq!(out.eta, 10.0);
        assert_eq!(out.backtracks, 0);
    }

    #[test]
    fn reset_rules() {
        let mut cfg = ls_config(LineSearchMode::Armijo, 0.5, 50.0);

        // k = 0 always starts at eta_max
        for opt in [ResetOption::Keep, ResetOption::Grow, ResetOption::Restart] {
            cfg.reset = opt;
            assert_eq!(reset_start(&cfg, 0.3, 0, 128, 1280), 50.0);
        }

        cfg.reset = ResetOption::Keep;
        assert_eq!(reset_start(&cfg, 0.3, 5, 128, 1280), 0.3);

        // opt 1: 0.5 * 2^{128/1280} = 0.5 * 2^0.1
        cfg.reset = ResetOption::Grow;
        cfg.reset_growth = 2.0;
        let got = reset_start(&cfg, 0.5, 5, 128, 1280);
        assert!((got - 0.5 * 2f64.powf(0.1)).abs() < 1e-15);
        assert!((got - 0.535887).abs() < 1e-6);

        cfg.reset = ResetOption::Restart;
        assert_eq!(reset_start(&cfg, 0.3, 5, 128, 1280), 50.0);

        // conservative forces Keep regardless of the option
        cfg.conservative = true;
        cfg.reset = ResetOption::Restart;
        assert_eq!(reset_start(&cfg, 0.3, 5, 128, 1280), 0.3);
    }

    fn sps_config(mode: SpsMode, c: f64, eta_max: f64) -> SpsConfig {
        let mut cfg = SpsConfig::new(mode);
        cfg.c = c;
        cfg.eta_max = eta_max;
        cfg.smoothing = Smoothing::Off;
        cfg
    }

    #[test]
    fn sps_quadratic_is_inverse_curvature() {
        // f_i = (L/2) w^2, f_i* = 0: gap / (c ||g||^2) = 1 / (2 c L).
        // c = 1/2, L = 4 -> 0.25.
        let obj = Quadratics::single(4.0);
        let cfg = sps_config(SpsMode::Plain, 0.5, 1e6);
        let w = Weights::new(vec![3.7]);
        let g = obj.batch_grad(&[0], &w);
        let out = sps_step(&cfg, &obj, &[0], &w, &g, 1e6).unwrap();
        assert!((out.eta - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sps_is_clamped_by_eta_max() {
        // gap term far above eta_max = 1 -> returns 1
        let obj = Quadratics::single(1e-3);
        let cfg = sps_config(SpsMode::Plain, 0.5, 1.0);
        let w = Weights::new(vec![10.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = sps_step(&cfg, &obj, &[0], &w, &g, 1e9).unwrap();
        assert_eq!(out.eta, 1.0);
    }

    #[test]
    fn sps_smoothing_caps_growth() {
        // tau = 2^0.1, eta_prev = 0.1, unclamped SPS far above -> 0.1 * 2^0.1
        let obj = Quadratics::single(1e-4);
        let mut cfg = sps_config(SpsMode::Plain, 0.5, 1e6);
        cfg.smoothing = Smoothing::Tau(2f64.powf(0.1));
        let w = Weights::new(vec![1.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = sps_step(&cfg, &obj, &[0], &w, &g, 0.1).unwrap();
        assert!((out.eta - 0.1 * 2f64.powf(0.1)).abs() < 1e-15);
        assert!((out.eta - 0.107177).abs() < 1e-6);
    }

    #[test]
    fn sps_zero_gap_zero_gradient_returns_bound() {
        let obj = Quadratics::single(2.0);
        let cfg = sps_config(SpsMode::Plain, 0.5, 7.0);
        let w = Weights::new(vec![0.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = sps_step(&cfg, &obj, &[0], &w, &g, 7.0).unwrap();
        assert_eq!(out.eta, 7.0);
    }

    #[test]
    fn sps_negative_gap_is_error() {
        // declare f_i* above the attainable minimum via a shifted objective
        struct Shifted;
        impl FiniteSumObjective for Shifted {
            fn num_components(&self) -> usize {
                1
            }
            fn dim(&self) -> usize {
                1
            }
            fn component_value(&self, _i: usize, w: &Weights) -> f64 {
                0.5 * w[0] * w[0]
            }
            fn component_grad(&self, _i: usize, w: &Weights) -> Weights {
                Weights::new(vec![w[0]])
            }
            fn component_min(&self, _i: usize) -> f64 {
                1.0 // wrong: true infimum is 0
            }
        }
        let cfg = sps_config(SpsMode::Plain, 0.5, 1.0);
        let w = Weights::new(vec![0.1]);
        let g = Shifted.component_grad(0, &w);
        match sps_step(&cfg, &Shifted, &[0], &w, &g, 1.0) {
            Err(Error::NegativeSpsGap { .. }) => {}
            other => panic!("expected negative-gap error, got {other:?}"),
        }
    }

    #[test]
    fn armijo_sps_identity_matches_plain_bitwise() {
        let obj = Quadratics {
            curv: vec![4.0, 0.5],
            center: vec![0.0, 2.0],
        };
        let cfg = sps_config(SpsMode::Armijo, 0.5, 10.0);
        let precond = PreconditionerState::frozen(vec![1.0]).unwrap();
        let w = Weights::new(vec![1.3]);
        let g = obj.batch_grad(&[0, 1], &w);
        let a = armijo_sps_step(&cfg, &obj, &[0, 1], &w, &g, &precond, 10.0).unwrap();
        let p = sps_step(&cfg, &obj, &[0, 1], &w, &g, 10.0).unwrap();
        assert_eq!(a.eta.to_bits(), p.eta.to_bits());
    }

    #[test]
    fn armijo_sps_scalar_closed_form() {
        // 1-D quadratic with A = a: eta = a / (2 c L); a = 3, c = 1/2, L = 3 -> 1.
        let obj = Quadratics::single(3.0);
        let cfg = sps_config(SpsMode::Armijo, 0.5, 1e6);
        let precond = PreconditionerState::frozen(vec![3.0]).unwrap();
        let w = Weights::new(vec![-2.0]);
        let g = obj.batch_grad(&[0], &w);
        let out = armijo_sps_step(&cfg, &obj, &[0], &w, &g, &precond, 1e6).unwrap();
        assert!((out.eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theoretical_constants() {
        // no-momentum: a_min / (2 L_max) with L_max = 2, a_min = 1 -> 0.25
        assert_eq!(
            theoretical_constant(TheoremConstant::AmsgradConstant, 2.0, 1.0, 0.0),
            0.25
        );
        // beta = 0 momentum variant equals the no-momentum value
        assert_eq!(
            theoretical_constant(TheoremConstant::AmsgradConstantMomentum, 2.0, 1.0, 0.0),
            theoretical_constant(TheoremConstant::AmsgradConstant, 2.0, 1.0, 0.0)
        );
        // beta = 0.9, L_max = 1, a_min = 1 -> (0.1/1.9) * 0.5
        let got = theoretical_constant(TheoremConstant::AmsgradConstantMomentum, 1.0, 1.0, 0.9);
        assert!((got - 0.1 / 1.9 * 0.5).abs() < 1e-15);
        assert!((got - 0.0263158).abs() < 1e-7);
    }

    #[test]
    fn configs_reject_out_of_range_parameters() {
        let mut ls = LineSearchConfig::new(LineSearchMode::Armijo);
        ls.c = 1.0; // line-search c must stay below 1
        assert!(ls.validate().is_err());
        ls.c = 0.5;
        ls.backtrack_factor = 1.0;
        assert!(ls.validate().is_err());

        let mut sps = SpsConfig::new(SpsMode::Plain);
        sps.c = 19.0; // SPS allows c > 1 (momentum theory needs it)
        assert!(sps.validate().is_ok());
        sps.c = 0.0;
        assert!(sps.validate().is_err());
        sps.c = 0.5;
        sps.smoothing = Smoothing::Tau(0.5);
        assert!(sps.validate().is_err());
    }

    #[test]
    fn objective_scaling_scales_sps_inversely() {
        // scaling f by s scales the gap and the gradient-norm term so the
        // unclamped SPS value scales by 1/s
        let cfg = sps_config(SpsMode::Plain, 0.5, 1e12);
        let w = Weights::new(vec![0.9]);
        for s in [2.0, 10.0, 0.25] {
            let base = Quadratics::single(3.0);
            let scaled = Quadratics::single(3.0 * s);
            let g0 = base.batch_grad(&[0], &w);
            let g1 = scaled.batch_grad(&[0], &w);
            let e0 = sps_step(&cfg, &base, &[0], &w, &g0, 1e12).unwrap().eta;
            let e1 = sps_step(&cfg, &scaled, &[0], &w, &g1, 1e12).unwrap().eta;
            assert!((e1 - e0 / s).abs() < 1e-12 * e0.max(1.0));
        }
    }

    #[test]
    fn objective_scaling_scales_armijo_acceptance_inversely() {
        // 1-D quadratic: acceptance region is eta <= 2(1-c)/L, so scaling the
        // objective by s shrinks the accepted step by 1/s on the same grid
        let cfg = ls_config(LineSearchMode::Lipschitz, 0.5, 16.0);
        let w = Weights::new(vec![1.0]);
        let base = Quadratics::single(0.5);
        let scaled = Quadratics::single(0.5 * 4.0);
        let g0 = base.batch_grad(&[0], &w);
        let g1 = scaled.batch_grad(&[0], &w);
        let e0 = lipschitz_search(&cfg, &base, &[0], &w, &g0, 16.0).eta;
        let e1 = lipschitz_search(&cfg, &scaled, &[0], &w, &g1, 16.0).eta;
        // the grid is geometric with factor 1/2, and s = 4 is a grid power
        assert_eq!(e1, e0 / 4.0);
    }
}
