//! Post-hoc verification and measurement over recorded trajectories:
//! interpolation-violation sigma^2, step-size bound compliance, preconditioner
//! lemma checks, rate constants from the convergence theorems, and empirical
//! rate fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::FiniteSumObjective;
use crate::optimizer::TrajectoryRecord;
use crate::precond::PrecondKind;
use crate::step_size::{LineSearchMode, SpsMode, StepSizeController};
use crate::weights::Weights;

/// Problem constants feeding the theorem formulas. The iterate-radius bound D
/// is measured from a trajectory rather than assumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryInputs {
    pub l_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Iterate radius D, max_k ||w_k - w_ref||.
    pub radius: f64,
    pub dim: usize,
    pub beta: f64,
    pub sigma_sq: f64,
}

impl TheoryInputs {
    pub fn kappa(&self) -> f64 {
        self.a_max / self.a_min
    }
}

/// sigma^2 = (1/n) sum_i (f_i(w*) - f_i*). Component gaps within rounding
/// noise of zero are clipped at 0; a gap below -1e-9 means the f* source or
/// the reference point is wrong and is an error.
pub fn estimate_sigma_sq(obj: &dyn FiniteSumObjective, w_star: &Weights) -> Result<f64> {
    let n = obj.num_components();
    let mut acc = 0.0;
    for i in 0..n {
        let gap = obj.component_value(i, w_star) - obj.component_min(i);
        if gap < -1e-9 {
            return Err(Error::ValueBelowInfimum {
                index: i,
                amount: -gap,
            });
        }
        acc += gap.max(0.0);
    }
    Ok(acc / n as f64)
}

/// max_k ||w_k - reference|| over recorded iterates.
pub fn measure_radius(iterates: &[Weights], reference: &Weights) -> f64 {
    iterates
        .iter()
        .map(|w| w.minus(reference).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub iter: usize,
    pub eta: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Outcome of replaying the step-size range guarantees over a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub total_steps: usize,
    pub violations: usize,
    pub violation_fraction: f64,
    pub first_violation: Option<BoundViolation>,
    /// Constant controllers have nothing to check.
    pub vacuous: bool,
}

/// Check every recorded step-size against the applicable range.
///
/// Line-searches: eta_k in [gamma_bt * min{start_k, 2 (1-c) m_k / L_max},
/// eta_bound_k], where m_k is a_min(A_k) for Armijo and 1 for Lipschitz
/// (the gamma_bt factor is the backtracking grid slack). SPS: eta_k in
/// [min{eta_bound_k, m_k / (2 c L_max)}, eta_bound_k]. Constant step-sizes
/// pass vacuously.
pub fn check_step_bounds(traj: &TrajectoryRecord, theory: &TheoryInputs) -> BoundsReport {
    let controller = &traj.meta.config.controller;
    let mut report = BoundsReport {
        total_steps: traj.steps.len(),
        violations: 0,
        violation_fraction: 0.0,
        first_violation: None,
        vacuous: false,
    };
    // fp slack on the lower bounds: the lemma equality case (quadratics) can
    // land within an ulp of the bound
    const REL_SLACK: f64 = 1e-12;

    for rec in &traj.steps {
        let (lower, upper) = match controller {
            StepSizeController::Constant { .. } => {
                report.vacuous = true;
                return report;
            }
            StepSizeController::LineSearch(cfg) => {
                let factor = match cfg.mode {
                    LineSearchMode::Armijo => rec.a_min,
                    LineSearchMode::Lipschitz => 1.0,
                };
                let start = rec.eta_start.unwrap_or(cfg.eta_max);
                let guaranteed = 2.0 * (1.0 - cfg.c) * factor / theory.l_max;
                (cfg.backtrack_factor * start.min(guaranteed), rec.eta_bound)
            }
            StepSizeController::Sps(cfg) => {
                let factor = match cfg.mode {
                    SpsMode::Armijo => rec.a_min,
                    SpsMode::Plain => 1.0,
                };
                let guaranteed = factor / (2.0 * cfg.c * theory.l_max);
                (rec.eta_bound.min(guaranteed), rec.eta_bound)
            }
        };
        let ok = rec.eta >= lower * (1.0 - REL_SLACK) && rec.eta <= upper;
        if !ok {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(BoundViolation {
                    iter: rec.k,
                    eta: rec.eta,
                    lower,
                    upper,
                });
            }
        }
    }
    if report.total_steps > 0 {
        report.violation_fraction = report.violations as f64 / report.total_steps as f64;
    }
    report
}

/// True iff the recorded preconditioner diagonal never decreased, exactly.
pub fn check_amsgrad_monotone(traj: &TrajectoryRecord) -> bool {
    traj.steps.iter().all(|rec| rec.min_diag_diff >= 0.0)
}

/// Margins of the two AdaGrad trace lemmas on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdagradLemmaReport {
    /// sum_k ||g_k||^2_{A_k^-1} and its bound 2 Tr(A_T).
    pub precond_norm_sum: f64,
    pub trace_bound: f64,
    pub norm_lemma_holds: bool,
    /// Tr(A_T) - d eps and its bound sqrt(d sum_k ||g_k||^2).
    pub trace_minus_eps: f64,
    pub grad_sum_bound: f64,
    pub trace_lemma_holds: bool,
}

/// Verify sum_k ||g_k||^2_{A_k^-1} <= 2 Tr(A_T) and
/// Tr(A_T) - d eps <= sqrt(d sum_k ||g_k||^2) on an (unclamped) AdaGrad
/// trajectory. The eps-relaxed forms hold for any eps >= 0.
pub fn check_adagrad_lemmas(traj: &TrajectoryRecord) -> Result<AdagradLemmaReport> {
    let cfg = &traj.meta.config.precond;
    if cfg.kind != PrecondKind::Adagrad || cfg.clamp.is_some() {
        return Err(Error::InvalidInput(
            "adagrad lemma check requires an unclamped adagrad trajectory".into(),
        ));
    }
    let last = traj
        .steps
        .last()
        .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
    let precond_norm_sum: f64 = traj.steps.iter().map(|r| r.precond_norm_sq).sum();
    let grad_norm_sum: f64 = traj.steps.iter().map(|r| r.grad_norm_sq).sum();
    let d = traj.meta.dim as f64;

    let trace_bound = 2.0 * last.trace_a;
    let trace_minus_eps = last.trace_a - d * cfg.epsilon;
    let grad_sum_bound = (d * grad_norm_sum).sqrt();
    Ok(AdagradLemmaReport {
        precond_norm_sum,
        trace_bound,
        norm_lemma_holds: precond_norm_sum <= trace_bound,
        trace_minus_eps,
        grad_sum_bound,
        trace_lemma_holds: trace_minus_eps <= grad_sum_bound,
    })
}

/// Which theorem's rate constant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum RateTheorem {
    /// alpha = (1/2) (D^2/eta + 2 eta)^2 d L_max; the bound curve is
    /// alpha/T + sqrt(alpha) sigma / sqrt(T).
    AdagradConstant { eta: f64 },
    /// ((1+beta)/(1-beta))^2 * 2 L_max D^2 d kappa; the bound curve is
    /// constant/T + sigma^2.
    AmsgradConstantMomentum,
}

/// Evaluate the cited theorem constant.
pub fn rate_constant(theorem: RateTheorem, inputs: &TheoryInputs) -> f64 {
    match theorem {
        RateTheorem::AdagradConstant { eta } => {
            0.5 * (inputs.radius.powi(2) / eta + 2.0 * eta).powi(2)
                * inputs.dim as f64
                * inputs.l_max
        }
        RateTheorem::AmsgradConstantMomentum => {
            let ratio = (1.0 + inputs.beta) / (1.0 - inputs.beta);
            ratio.powi(2)
                * 2.0
                * inputs.l_max
                * inputs.radius.powi(2)
                * inputs.dim as f64
                * inputs.kappa()
        }
    }
}

/// The suboptimality bound at iteration count T implied by the theorem.
pub fn bound_curve(theorem: RateTheorem, inputs: &TheoryInputs, t: f64) -> f64 {
    let constant = rate_constant(theorem, inputs);
    match theorem {
        RateTheorem::AdagradConstant { .. } => {
            constant / t + constant.sqrt() * inputs.sigma_sq.sqrt() / t.sqrt()
        }
        RateTheorem::AmsgradConstantMomentum => constant / t + inputs.sigma_sq,
    }
}

/// Log-log least-squares fit of a suboptimality series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit log(value) against log(T). Values must be positive; at least two
/// points are required.
pub fn fit_rate(series: &[(f64, f64)]) -> Result<RateFit> {
    if series.len() < 2 {
        return Err(Error::InvalidInput(
            "rate fit needs at least two points".into(),
        ));
    }
    if let Some((t, v)) = series.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "rate fit requires positive values, got ({t}, {v})"
        )));
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|(_, v)| v.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "rate fit requires at least two distinct T values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        ss_res += (y - (intercept + slope * x)).powi(2);
        ss_tot += (y - mean_y).powi(2);
    }
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// a + sqrt(a b): any x with x^2 <= a (x + b) satisfies x <= a + sqrt(a b).
pub fn quadratic_bound(a: f64, b: f64) -> Result<f64> {
    if a < 0.0 || b < 0.0 {
        return Err(Error::InvalidInput(format!(
            "quadratic bound requires nonnegative inputs, got ({a}, {b})"
        )));
    }
    Ok(a + (a * b).sqrt())
}
