//! Deep (two-layer linear) matrix factorization:
//! min over W1 (k x 6), W2 (10 x k) of the empirical mean of
//! ||W2 W1 x_i - A x_i||^2 over a fixed set of Gaussian samples, where the
//! 10 x 6 target A has condition number 1e10.
//!
//! The target is built as U diag(s) V^T with log-spaced singular values, and
//! its action is evaluated through the stored factors (U sqrt(s) applied
//! after sqrt(s) V^T, the same two-stage shape as the model). At full rank
//! the canonical factors therefore reproduce the target bitwise and every
//! component loss is exactly zero.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::objective::FiniteSumObjective;
use crate::weights::Weights;

pub const TARGET_ROWS: usize = 10;
pub const TARGET_COLS: usize = 6;
pub const NUM_SAMPLES: usize = 1000;
pub const CONDITION_NUMBER: f64 = 1e10;

#[derive(Debug, Clone)]
pub struct MatrixFactorizationProblem {
    rank: usize,
    /// sqrt(s) V^T, 6 x 6 row-major.
    t1: Vec<f64>,
    /// U sqrt(s), 10 x 6 row-major.
    t2: Vec<f64>,
    /// Prescribed singular values of the target.
    singular_values: [f64; TARGET_COLS],
    /// 1000 x 6 sample matrix, row-major.
    samples: Vec<f64>,
}

impl MatrixFactorizationProblem {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_samples(&self) -> usize {
        NUM_SAMPLES
    }

    /// Dimension of the flattened parameter vector [W1 | W2]: 6k + 10k.
    pub fn param_dim(&self) -> usize {
        TARGET_COLS * self.rank + TARGET_ROWS * self.rank
    }

    pub fn singular_values(&self) -> &[f64; TARGET_COLS] {
        &self.singular_values
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.samples[i * TARGET_COLS..(i + 1) * TARGET_COLS]
    }

    /// The materialized 10 x 6 target matrix (product of the stored factors).
    pub fn target_matrix(&self) -> Vec<f64> {
        let mut a = vec![0.0; TARGET_ROWS * TARGET_COLS];
        for i in 0..TARGET_ROWS {
            for j in 0..TARGET_COLS {
                let mut acc = 0.0;
                for l in 0..TARGET_COLS {
                    acc += self.t2[i * TARGET_COLS + l] * self.t1[l * TARGET_COLS + j];
                }
                a[i * TARGET_COLS + j] = acc;
            }
        }
        a
    }

    /// Parameters that reproduce the target exactly: W1 = [sqrt(s) V^T; 0],
    /// W2 = [U sqrt(s) | 0]. Requires rank >= 6.
    pub fn exact_solution(&self) -> Option<Weights> {
        if self.rank < TARGET_COLS {
            return None;
        }
        let k = self.rank;
        let mut w = vec![0.0; self.param_dim()];
        for row in 0..TARGET_COLS {
            w[row * TARGET_COLS..(row + 1) * TARGET_COLS]
                .copy_from_slice(&self.t1[row * TARGET_COLS..(row + 1) * TARGET_COLS]);
        }
        let w2_off = TARGET_COLS * k;
        for row in 0..TARGET_ROWS {
            for col in 0..TARGET_COLS {
                w[w2_off + row * k + col] = self.t2[row * TARGET_COLS + col];
            }
        }
        Some(Weights::new(w))
    }

    fn apply_target(&self, x: &[f64], z: &mut [f64; TARGET_ROWS]) {
        let mut t = [0.0; TARGET_COLS];
        matvec(TARGET_COLS, TARGET_COLS, &self.t1, x, &mut t);
        matvec(TARGET_ROWS, TARGET_COLS, &self.t2, &t, z);
    }
}

/// row-major (rows x cols) matrix times vector
fn matvec(rows: usize, cols: usize, mat: &[f64], x: &[f64], out: &mut [f64]) {
    for i in 0..rows {
        let mut acc = 0.0;
        for j in 0..cols {
            acc += mat[i * cols + j] * x[j];
        }
        out[i] = acc;
    }
}

/// Orthonormalize the columns of a Gaussian rows x cols matrix
/// (modified Gram-Schmidt, run twice).
fn orthonormal_columns(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    assert!(cols <= rows);
    let mut m: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    for _ in 0..2 {
        for c in 0..cols {
            for prev in 0..c {
                let mut dot = 0.0;
                for r in 0..rows {
                    dot += m[r * cols + c] * m[r * cols + prev];
                }
                for r in 0..rows {
                    m[r * cols + c] -= dot * m[r * cols + prev];
                }
            }
            let norm = (0..rows).map(|r| m[r * cols + c].powi(2)).sum::<f64>().sqrt();
            for r in 0..rows {
                m[r * cols + c] /= norm;
            }
        }
    }
    m
}

/// Build the factorization problem and its finite-sum objective. The target
/// and the sample set depend only on the seed, so different ranks share the
/// same problem data.
pub fn gen_matrix_factorization(
    rank: usize,
    seed: u64,
) -> Result<(MatrixFactorizationProblem, MatrixFactorizationObjective)> {
    if !(1..=TARGET_ROWS).contains(&rank) {
        return Err(Error::InvalidConfig(format!(
            "rank must lie in [1, {TARGET_ROWS}], got {rank}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = orthonormal_columns(TARGET_ROWS, TARGET_COLS, &mut rng);
    let v = orthonormal_columns(TARGET_COLS, TARGET_COLS, &mut rng);

    // log-spaced singular values with s_max / s_min = 1e10
    let mut singular_values = [0.0; TARGET_COLS];
    let span = CONDITION_NUMBER.log10();
    for (j, s) in singular_values.iter_mut().enumerate() {
        *s = 10f64.powf(-span * j as f64 / (TARGET_COLS - 1) as f64);
    }

    let mut t1 = vec![0.0; TARGET_COLS * TARGET_COLS];
    let mut t2 = vec![0.0; TARGET_ROWS * TARGET_COLS];
    for j in 0..TARGET_COLS {
        let root = singular_values[j].sqrt();
        for col in 0..TARGET_COLS {
            // row j of t1 is sqrt(s_j) * (column j of V)^T
            t1[j * TARGET_COLS + col] = root * v[col * TARGET_COLS + j];
        }
        for row in 0..TARGET_ROWS {
            t2[row * TARGET_COLS + j] = u[row * TARGET_COLS + j] * root;
        }
    }

    let samples: Vec<f64> = (0..NUM_SAMPLES * TARGET_COLS)
        .map(|_| rng.sample(StandardNormal))
        .collect();

    let problem = MatrixFactorizationProblem {
        rank,
        t1,
        t2,
        singular_values,
        samples,
    };
    let objective = MatrixFactorizationObjective {
        problem: problem.clone(),
    };
    Ok((problem, objective))
}

#[derive(Debug, Clone)]
pub struct MatrixFactorizationObjective {
    problem: MatrixFactorizationProblem,
}

impl MatrixFactorizationObjective {
    pub fn problem(&self) -> &MatrixFactorizationProblem {
        &self.problem
    }

    fn forward(&self, i: usize, w: &Weights) -> ([f64; TARGET_ROWS], Vec<f64>) {
        let k = self.problem.rank;
        let x = self.problem.sample(i);
        let w1 = &w.as_slice()[..TARGET_COLS * k];
        let w2 = &w.as_slice()[TARGET_COLS * k..];
        let mut hidden = vec![0.0; k];
        matvec(k, TARGET_COLS, w1, x, &mut hidden);
        let mut z = [0.0; TARGET_ROWS];
        matvec(TARGET_ROWS, k, w2, &hidden, &mut z);
        let mut target = [0.0; TARGET_ROWS];
        self.problem.apply_target(x, &mut target);
        let mut residual = [0.0; TARGET_ROWS];
        for r in 0..TARGET_ROWS {
            residual[r] = z[r] - target[r];
        }
        (residual, hidden)
    }
}

impl FiniteSumObjective for MatrixFactorizationObjective {
    fn num_components(&self) -> usize {
        NUM_SAMPLES
    }

    fn dim(&self) -> usize {
        self.problem.param_dim()
    }

    fn component_value(&self, i: usize, w: &Weights) -> f64 {
        let (residual, _) = self.forward(i, w);
        residual.iter().map(|r| r * r).sum()
    }

    fn component_grad(&self, i: usize, w: &Weights) -> Weights {
        let k = self.problem.rank;
        let x = self.problem.sample(i);
        let (residual, hidden) = self.forward(i, w);
        let w2 = &w.as_slice()[TARGET_COLS * k..];

        let mut grad = vec![0.0; self.dim()];
        // dL/dW2 = 2 r h^T
        let g2 = &mut grad[TARGET_COLS * k..];
        for r in 0..TARGET_ROWS {
            for j in 0..k {
                g2[r * k + j] = 2.0 * residual[r] * hidden[j];
            }
        }
        // dL/dW1 = 2 (W2^T r) x^T
        let mut w2t_r = vec![0.0; k];
        for r in 0..TARGET_ROWS {
            for j in 0..k {
                w2t_r[j] += w2[r * k + j] * residual[r];
            }
        }
        for j in 0..k {
            for col in 0..TARGET_COLS {
                grad[j * TARGET_COLS + col] = 2.0 * w2t_r[j] * x[col];
            }
        }
        Weights::new(grad)
    }
}
