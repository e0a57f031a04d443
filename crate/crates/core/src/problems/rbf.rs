//! RBF kernel feature mapping for binary classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::dataset::{Dataset, FeatureMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// RBF bandwidth sigma in K(x, y) = exp(-||x - y||^2 / (2 sigma^2)).
    pub bandwidth: f64,
}

/// Replace each feature row with its kernel row
/// (K(x_i, x_1), ..., K(x_i, x_n)); the output is n x n and labels carry over.
pub fn rbf_map(ds: &Dataset, cfg: &KernelConfig) -> Result<Dataset> {
    if !(cfg.bandwidth > 0.0 && cfg.bandwidth.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "kernel bandwidth must be positive, got {}",
            cfg.bandwidth
        )));
    }
    let n = ds.num_examples();
    let denom = 2.0 * cfg.bandwidth * cfg.bandwidth;
    let norms: Vec<f64> = (0..n).map(|i| ds.features().row_norm_sq(i)).collect();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let dist_sq = (norms[i] + norms[j] - 2.0 * ds.features().rows_dot(i, j)).max(0.0);
            let k = (-dist_sq / denom).exp();
            data[i * n + j] = k;
            data[j * n + i] = k;
        }
    }
    Dataset::new(
        FeatureMatrix::Dense {
            rows: n,
            cols: n,
            data,
        },
        ds.labels().to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::separable::{gen_separable, SeparableConfig};

    fn base() -> Dataset {
        gen_separable(&SeparableConfig {
            n: 30,
            d: 4,
            margin: 0.1,
            seed: 5,
        })
        .unwrap()
        .0
    }

    #[test]
    fn kernel_diagonal_is_one() {
        let mapped = rbf_map(&base(), &KernelConfig { bandwidth: 0.7 }).unwrap();
        for i in 0..mapped.num_examples() {
            assert_eq!(mapped.features().row_dense(i)[i], 1.0);
        }
    }

    #[test]
    fn wide_bandwidth_sends_entries_to_one() {
        let mapped = rbf_map(&base(), &KernelConfig { bandwidth: 1e6 }).unwrap();
        for i in 0..mapped.num_examples() {
            for k in mapped.features().row_dense(i) {
                assert!(k > 0.999);
            }
        }
    }

    #[test]
    fn kernel_matrix_is_symmetric() {
        let mapped = rbf_map(&base(), &KernelConfig { bandwidth: 0.5 }).unwrap();
        let n = mapped.num_examples();
        for i in 0..n {
            let row_i = mapped.features().row_dense(i);
            for j in 0..n {
                let row_j = mapped.features().row_dense(j);
                assert!((row_i[j] - row_j[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_bandwidth() {
        assert!(rbf_map(&base(), &KernelConfig { bandwidth: 0.0 }).is_err());
        assert!(rbf_map(&base(), &KernelConfig { bandwidth: -1.0 }).is_err());
    }

    #[test]
    fn output_is_square_and_keeps_labels() {
        let ds = base();
        let mapped = rbf_map(&ds, &KernelConfig { bandwidth: 1.0 }).unwrap();
        assert_eq!(mapped.num_examples(), ds.num_examples());
        assert_eq!(mapped.num_features(), ds.num_examples());
        assert_eq!(mapped.labels(), ds.labels());
    }
}
