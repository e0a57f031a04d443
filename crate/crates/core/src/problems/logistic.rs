//! Unregularized logistic loss over a binary-classification dataset:
//! f_i(w) = log(1 + exp(-y_i <x_i, w>)), with f_i* = 0.

use crate::objective::FiniteSumObjective;
use crate::problems::dataset::Dataset;
use crate::weights::Weights;

#[derive(Debug, Clone)]
pub struct LogisticObjective {
    dataset: Dataset,
}

/// Wrap a dataset as a finite-sum logistic objective.
pub fn logistic_objective(dataset: Dataset) -> LogisticObjective {
    LogisticObjective { dataset }
}

/// Exact per-component smoothness bound for logistic loss:
/// L_max = max_i ||x_i||^2 / 4.
pub fn lmax_logistic(ds: &Dataset) -> f64 {
    (0..ds.num_examples())
        .map(|i| ds.features().row_norm_sq(i) / 4.0)
        .fold(0.0, f64::max)
}

/// log(1 + exp(t)) without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// 1 / (1 + exp(t)), i.e. sigma(-t).
fn sigmoid_neg(t: f64) -> f64 {
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl LogisticObjective {
    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }
}

impl FiniteSumObjective for LogisticObjective {
    fn num_components(&self) -> usize {
        self.dataset.num_examples()
    }

    fn dim(&self) -> usize {
        self.dataset.num_features()
    }

    fn component_value(&self, i: usize, w: &Weights) -> f64 {
        let z = self.dataset.label(i) * self.dataset.features().row_dot(i, w);
        softplus(-z)
    }

    fn component_grad(&self, i: usize, w: &Weights) -> Weights {
        let y = self.dataset.label(i);
        let z = y * self.dataset.features().row_dot(i, w);
        let coeff = -y * sigmoid_neg(z);
        let mut g = vec![0.0; self.dim()];
        self.dataset.features().row_add_scaled(i, coeff, &mut g);
        Weights::new(g)
    }

    fn known_l_max(&self) -> Option<f64> {
        Some(lmax_logistic(&self.dataset))
    }
}
