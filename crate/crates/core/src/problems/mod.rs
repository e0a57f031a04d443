//! Desk-scale test problems: margin-controlled separable logistic regression,
//! RBF-kernel classification, deep matrix factorization, and LIBSVM loaders.

pub mod dataset;
pub mod logistic;
pub mod matrix_factorization;
pub mod rbf;
pub mod separable;

pub use dataset::{parse_libsvm, write_libsvm, Dataset, FeatureMatrix};
pub use logistic::{lmax_logistic, logistic_objective, LogisticObjective};
pub use matrix_factorization::{
    gen_matrix_factorization, MatrixFactorizationObjective, MatrixFactorizationProblem,
};
pub use rbf::{rbf_map, KernelConfig};
pub use separable::{gen_separable, min_margin, SeparableConfig};
