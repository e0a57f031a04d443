//! Diagonal adaptive preconditioners.
//!
//! Each method keeps a second-moment accumulator G_k and an active diagonal
//! A_k used to precondition the update direction:
//!
//! - AdaGrad:  G_k = G_{k-1} + g_k^2,                A_k = sqrt(G_k) + eps
//! - RMSProp:  G_k = b2 G_{k-1} + (1-b2) g_k^2,      A_k = sqrt(G_k) + eps
//! - Adam:     same G_k, bias-corrected before the root:
//!   A_k = sqrt(G_k / (1 - b2^k)) + eps
//! - AMSGrad:  Adam candidate, then A_k = max(A_{k-1}, candidate) coordinatewise
//! - Identity: A_k = 1 (plain SGD)
//!
//! All squares/roots/maxes are coordinatewise. Entries of A_k may optionally
//! be projected onto a fixed [a_min, a_max] interval after every update.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weights;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecondKind {
    Identity,
    Adagrad,
    Rmsprop,
    Adam,
    Amsgrad,
}

/// Interval the preconditioner eigenvalues are projected onto, with
/// kappa = a_max / a_min.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecondBounds {
    pub a_min: f64,
    pub a_max: f64,
}

impl PrecondBounds {
    pub fn new(a_min: f64, a_max: f64) -> Result<Self> {
        if !(a_min > 0.0 && a_min <= a_max && a_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "preconditioner bounds must satisfy 0 < a_min <= a_max, got [{a_min}, {a_max}]"
            )));
        }
        Ok(PrecondBounds { a_min, a_max })
    }

    pub fn kappa(&self) -> f64 {
        self.a_max / self.a_min
    }
}

/// Static configuration of a preconditioner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecondConfig {
    pub kind: PrecondKind,
    /// Exponential-average factor b2 for RMSProp/Adam/AMSGrad.
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    /// Regularizer added after the square root so A_k stays positive definite.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Divide G_k by (1 - b2^k) before the root (Adam/AMSGrad only). The
    /// exponent starts at k = 1, so the first correction cancels exactly.
    #[serde(default = "default_true")]
    pub bias_correction: bool,
    /// Optional projection of A_k entries onto [a_min, a_max].
    #[serde(default)]
    pub clamp: Option<PrecondBounds>,
}

fn default_beta2() -> f64 {
    0.999
}
fn default_epsilon() -> f64 {
    1e-8
}
fn default_true() -> bool {
    true
}

impl PrecondConfig {
    pub fn new(kind: PrecondKind) -> Self {
        PrecondConfig {
            kind,
            beta2: default_beta2(),
            epsilon: default_epsilon(),
            bias_correction: true,
            clamp: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidConfig(format!(
                "beta2 must lie in [0,1), got {}",
                self.beta2
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Mutable preconditioner state: accumulator G_k, active diagonal A_k and the
/// update counter k.
#[derive(Debug, Clone)]
pub struct PreconditionerState {
    config: PrecondConfig,
    accum: Vec<f64>,
    active: Vec<f64>,
    step: usize,
}

impl PreconditionerState {
    pub fn new(config: PrecondConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        let active = match config.kind {
            PrecondKind::Identity => vec![1.0; dim],
            _ => vec![config.epsilon; dim],
        };
        Ok(PreconditionerState {
            config,
            accum: vec![0.0; dim],
            active,
            step: 0,
        })
    }

    /// A preconditioner frozen at the given diagonal; updates leave it
    /// unchanged. Used for diagnostics and for exercising the controllers
    /// with a prescribed A.
    pub fn frozen(diag: Vec<f64>) -> Result<Self> {
        if diag.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidConfig(
                "frozen preconditioner diagonal must be positive and finite".into(),
            ));
        }
        let dim = diag.len();
        Ok(PreconditionerState {
            config: PrecondConfig::new(PrecondKind::Identity),
            accum: vec![0.0; dim],
            active: diag,
            step: 0,
        })
    }

    pub fn kind(&self) -> PrecondKind {
        self.config.kind
    }

    pub fn config(&self) -> &PrecondConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.active.len()
    }

    pub fn updates(&self) -> usize {
        self.step
    }

    /// The active diagonal A_k.
    pub fn diag(&self) -> &[f64] {
        &self.active
    }

    pub fn diag_min(&self) -> f64 {
        self.active.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn diag_max(&self) -> f64 {
        self.active
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Tr(A_k) = sum of the stored diagonal.
    pub fn trace(&self) -> f64 {
        self.active.iter().sum()
    }

    /// Absorb the batch gradient g_k into G_k and refresh A_k (Algorithm
    /// order: the preconditioner at step k already includes g_k).
    pub fn update(&mut self, g: &Weights) -> Result<()> {
        g.check_dim(self.dim())?;
        if !g.all_finite() {
            return Err(Error::NonFinite {
                what: "gradient passed to preconditioner",
                iter: self.step,
            });
        }
        self.step += 1;
        let eps = self.config.epsilon;
        match self.config.kind {
            PrecondKind::Identity => {}
            PrecondKind::Adagrad => {
                for j in 0..self.dim() {
                    self.accum[j] += g[j] * g[j];
                    self.active[j] = self.accum[j].sqrt() + eps;
                }
            }
            PrecondKind::Rmsprop => {
                let b2 = self.config.beta2;
                for j in 0..self.dim() {
                    self.accum[j] = b2 * self.accum[j] + (1.0 - b2) * g[j] * g[j];
                    self.active[j] = self.accum[j].sqrt() + eps;
                }
            }
            PrecondKind::Adam | PrecondKind::Amsgrad => {
                let b2 = self.config.beta2;
                let denom = if self.config.bias_correction {
                    1.0 - b2.powi(self.step as i32)
                } else {
                    1.0
                };
                let amsgrad = self.config.kind == PrecondKind::Amsgrad;
                for j in 0..self.dim() {
                    self.accum[j] = b2 * self.accum[j] + (1.0 - b2) * g[j] * g[j];
                    let candidate = (self.accum[j] / denom).sqrt() + eps;
                    self.active[j] = if amsgrad {
                        // max after adding eps keeps A_k >= eps and monotone
                        self.active[j].max(candidate)
                    } else {
                        candidate
                    };
                }
            }
        }
        if let Some(bounds) = self.config.clamp {
            self.clamp_eigenvalues(&bounds);
        }
        Ok(())
    }

    /// Coordinatewise v_j / A_j, i.e. A_k^{-1} v.
    pub fn apply_inverse(&self, v: &Weights) -> Result<Weights> {
        v.check_dim(self.dim())?;
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..self.dim() {
            if self.active[j] == 0.0 {
                return Err(Error::ZeroPreconditionerEntry { coordinate: j });
            }
            out.push(v[j] / self.active[j]);
        }
        Ok(Weights::new(out))
    }

    /// ||v||^2 in the A_k^{-1} metric: sum_j v_j^2 / A_j.
    pub fn precond_norm_sq(&self, v: &Weights) -> Result<f64> {
        v.check_dim(self.dim())?;
        let mut acc = 0.0;
        for j in 0..self.dim() {
            if self.active[j] == 0.0 {
                return Err(Error::ZeroPreconditionerEntry { coordinate: j });
            }
            acc += v[j] * v[j] / self.active[j];
        }
        Ok(acc)
    }

    /// Project every entry of A_k onto [a_min, a_max]. Clamping a
    /// coordinatewise non-decreasing sequence keeps it non-decreasing, so
    /// AMSGrad monotonicity survives the projection.
    pub fn clamp_eigenvalues(&mut self, bounds: &PrecondBounds) {
        for a in &mut self.active {
            *a = a.clamp(bounds.a_min, bounds.a_max);
        }
    }
}
