//! Adaptive-gradient optimizers composed with stochastic line-search and
//! Polyak step-size controllers, the test problems to drive them, and the
//! verification machinery for their step-size and preconditioner guarantees.
//!
//! The building blocks mirror the update
//! `w_{k+1} = w_k - eta_k A_k^{-1} m_k`:
//!
//! - [`precond`] — the diagonal preconditioners A_k (AdaGrad, RMSProp, Adam,
//!   AMSGrad, identity)
//! - [`step_size`] — eta_k: constants, Lipschitz/Armijo backtracking with
//!   reset policies, SPS and Armijo SPS with smoothing and conservative caps
//! - [`momentum`] — m_k: moving-average and heavy-ball compositions
//! - [`optimizer`] — the loop tying them together, with per-step trajectory
//!   records
//! - [`problems`] — separable logistic regression, RBF-kernel classification,
//!   deep matrix factorization, LIBSVM loading
//! - [`analysis`] — post-hoc checks: interpolation violation, step-size range
//!   compliance, preconditioner lemmas, rate constants and log-log rate fits

pub mod analysis;
pub mod error;
pub mod momentum;
pub mod objective;
pub mod optimizer;
pub mod precond;
pub mod problems;
pub mod step_size;
pub mod weights;

pub use error::{Error, Result};
pub use momentum::MomentumConfig;
pub use objective::FiniteSumObjective;
pub use optimizer::{
    run, step, uniform_average, Averaging, InitSpec, OptimizerState, RunConfig, RunOutput,
    StepRecord, TrajectoryMeta, TrajectoryRecord,
};
pub use precond::{PrecondBounds, PrecondConfig, PrecondKind, PreconditionerState};
pub use step_size::{
    LineSearchConfig, LineSearchMode, ResetOption, Smoothing, SpsConfig, SpsMode,
    StepSizeController, StepSizeOutcome, TheoremConstant,
};
pub use weights::Weights;
