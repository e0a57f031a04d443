//! Finite-sum objective oracle: f(w) = (1/n) sum_i f_i(w).

use crate::weights::Weights;

/// Oracle for the n component losses f_i, their gradients, and (when known)
/// the per-component infima f_i*.
///
/// `component_value` and `component_grad` must be pure: the same inputs always
/// produce the same outputs. That makes an objective safe to share across
/// concurrently executing runs.
///
/// Batch quantities are arithmetic means over the batch, accumulated in batch
/// index order and divided once, so independent re-implementations of the mean
/// agree to within accumulation tolerance.
pub trait FiniteSumObjective: Sync {
    /// Number of components n.
    fn num_components(&self) -> usize;

    /// Dimension d of the weight vector.
    fn dim(&self) -> usize;

    fn component_value(&self, i: usize, w: &Weights) -> f64;

    fn component_grad(&self, i: usize, w: &Weights) -> Weights;

    /// Known infimum of component i. Defaults to 0, the right value for
    /// nonnegative losses under interpolation.
    fn component_min(&self, _i: usize) -> f64 {
        0.0
    }

    /// Analytic max_i L_i when the problem knows it (logistic loss does);
    /// used by trajectory bound checks.
    fn known_l_max(&self) -> Option<f64> {
        None
    }

    /// Mean loss over a batch of component indices.
    fn batch_value(&self, batch: &[usize], w: &Weights) -> f64 {
        let mut acc = 0.0;
        for &i in batch {
            acc += self.component_value(i, w);
        }
        acc / batch.len() as f64
    }

    /// Mean gradient over a batch of component indices.
    fn batch_grad(&self, batch: &[usize], w: &Weights) -> Weights {
        let mut g = Weights::zeros(self.dim());
        for &i in batch {
            g.add_scaled(1.0, &self.component_grad(i, w));
        }
        g.scale(1.0 / batch.len() as f64);
        g
    }

    /// Mean of the per-component infima over a batch (the batch-level f*).
    fn batch_min(&self, batch: &[usize]) -> f64 {
        let mut acc = 0.0;
        for &i in batch {
            acc += self.component_min(i);
        }
        acc / batch.len() as f64
    }

    /// Full training loss f(w).
    fn full_value(&self, w: &Weights) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.num_components() {
            acc += self.component_value(i, w);
        }
        acc / self.num_components() as f64
    }

    /// Full gradient of f.
    fn full_grad(&self, w: &Weights) -> Weights {
        let mut g = Weights::zeros(self.dim());
        for i in 0..self.num_components() {
            g.add_scaled(1.0, &self.component_grad(i, w));
        }
        g.scale(1.0 / self.num_components() as f64);
        g
    }
}
