//! Fixtures shared by the criterion benches.

use asls_core::problems::{gen_separable, logistic_objective, LogisticObjective, SeparableConfig};
use asls_core::step_size::{LineSearchConfig, LineSearchMode};
use asls_core::{
    Averaging, InitSpec, MomentumConfig, PrecondConfig, PrecondKind, RunConfig, StepSizeController,
};

pub fn bench_problem(n: usize, d: usize) -> LogisticObjective {
    let (ds, _) = gen_separable(&SeparableConfig {
        n,
        d,
        margin: 0.1,
        seed: 7,
    })
    .expect("bench problem generates");
    logistic_objective(ds)
}

pub fn bench_config(kind: PrecondKind, armijo: bool, batch_size: usize, epochs: usize) -> RunConfig {
    let controller = if armijo {
        let mut ls = LineSearchConfig::new(LineSearchMode::Armijo);
        ls.eta_max = 100.0;
        StepSizeController::LineSearch(ls)
    } else {
        StepSizeController::Constant { eta: 0.1 }
    };
    RunConfig {
        batch_size,
        epochs,
        seed: 11,
        precond: PrecondConfig::new(kind),
        controller,
        momentum: MomentumConfig::MovingAverage { beta: 0.9 },
        averaging: Averaging::Last,
        init: InitSpec::Zeros,
        avg_checkpoints: vec![],
        record_iterates: false,
    }
}
