//! Momentum compositions: the moving-average buffer used by Adam/AMSGrad-style
//! updates and the classical heavy-ball term, plus the rewrite relating the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weights;

/// Momentum variant applied on top of the preconditioned step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentumConfig {
    /// No momentum: the direction is the gradient itself.
    None,
    /// m_k = beta m_{k-1} + (1 - beta) g_k, with the update -eta A^{-1} m_k.
    /// No bias correction is applied to m_k.
    MovingAverage { beta: f64 },
    /// w_{k+1} = w_k - eta A^{-1} g_k + gamma (w_k - w_{k-1}); the momentum
    /// term is neither preconditioned nor scaled by eta.
    HeavyBall { gamma: f64 },
}

impl MomentumConfig {
    pub fn validate(&self) -> Result<()> {
        let (name, value) = match self {
            MomentumConfig::None => return Ok(()),
            MomentumConfig::MovingAverage { beta } => ("beta", *beta),
            MomentumConfig::HeavyBall { gamma } => ("gamma", *gamma),
        };
        if !(0.0..1.0).contains(&value) {
            return Err(Error::InvalidConfig(format!(
                "momentum {name} must lie in [0,1), got {value}"
            )));
        }
        Ok(())
    }
}

/// m = beta * m_prev + (1 - beta) * g.
pub fn moving_average(m_prev: &Weights, g: &Weights, beta: f64) -> Weights {
    debug_assert_eq!(m_prev.dim(), g.dim());
    let mut out = Vec::with_capacity(g.dim());
    for j in 0..g.dim() {
        out.push(beta * m_prev[j] + (1.0 - beta) * g[j]);
    }
    Weights::new(out)
}

/// w - eta * precond_dir + gamma * (w - w_prev).
pub fn heavy_ball_update(
    w: &Weights,
    w_prev: &Weights,
    eta: f64,
    precond_dir: &Weights,
    gamma: f64,
) -> Weights {
    debug_assert_eq!(w.dim(), w_prev.dim());
    debug_assert_eq!(w.dim(), precond_dir.dim());
    let mut out = Vec::with_capacity(w.dim());
    for j in 0..w.dim() {
        out.push(w[j] - eta * precond_dir[j] + gamma * (w[j] - w_prev[j]));
    }
    Weights::new(out)
}

/// Coefficients of the moving-average update rewritten in heavy-ball form:
///
/// w_{k+1} = w_k - eta_k (1-beta) A_k^{-1} g_k
///           + beta (eta_k / eta_{k-1}) A_k^{-1} A_{k-1} (w_k - w_{k-1})
#[derive(Debug, Clone, PartialEq)]
pub struct HbEquivalence {
    /// Coefficient on the preconditioned gradient term: eta_k (1 - beta).
    pub grad_coeff: f64,
    /// Diagonal of the operator applied to (w_k - w_{k-1}):
    /// beta (eta_k / eta_{k-1}) A_k^{-1} A_{k-1}.
    pub momentum_diag: Weights,
}

/// Diagnostic comparison of the two momentum forms: with A_k = A_{k-1} = I and
/// eta_k = eta_{k-1} this is exactly heavy-ball with gamma = beta and step
/// eta (1 - beta).
pub fn amsgrad_to_hb_equivalent(
    eta_k: f64,
    eta_km1: f64,
    beta: f64,
    a_k: &[f64],
    a_km1: &[f64],
) -> Result<HbEquivalence> {
    if a_k.len() != a_km1.len() {
        return Err(Error::DimensionMismatch {
            expected: a_k.len(),
            got: a_km1.len(),
        });
    }
    if !(eta_k > 0.0 && eta_km1 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "step-sizes must be positive, got eta_k={eta_k}, eta_km1={eta_km1}"
        )));
    }
    if a_k.iter().chain(a_km1).any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidConfig(
            "preconditioner diagonals must be positive".into(),
        ));
    }
    let ratio = beta * (eta_k / eta_km1);
    let momentum_diag =
        Weights::new(a_k.iter().zip(a_km1).map(|(ak, akm)| ratio * akm / ak).collect());
    Ok(HbEquivalence {
        grad_coeff: eta_k * (1.0 - beta),
        momentum_diag,
    })
}
