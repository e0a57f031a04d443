//! Margin-controlled linearly-separable dataset generator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::dataset::{Dataset, FeatureMatrix};
use crate::weights::Weights;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparableConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_d")]
    pub d: usize,
    pub margin: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_n() -> usize {
    1000
}
fn default_d() -> usize {
    20
}

impl SeparableConfig {
    pub fn new(margin: f64) -> Self {
        SeparableConfig {
            n: default_n(),
            d: default_d(),
            margin,
            seed: 0,
        }
    }
}

/// Generate a linearly-separable dataset with a margin certificate:
/// y_i <x_i, w_true> >= margin for every i, with ||w_true|| = 1.
///
/// Construction: sample Gaussian features, fix a unit separator w_true, set
/// y_i = sign(<w_true, x_i>), then translate each point along y_i w_true
/// until its margin clears the target. The certificate is re-checked after
/// the translation so it holds exactly in floating point.
pub fn gen_separable(cfg: &SeparableConfig) -> Result<(Dataset, Weights)> {
    if !(cfg.margin > 0.0 && cfg.margin.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "margin must be positive, got {}",
            cfg.margin
        )));
    }
    if cfg.n == 0 || cfg.d == 0 {
        return Err(Error::InvalidConfig("n and d must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut w_true: Vec<f64> = (0..cfg.d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = w_true.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut w_true {
        *v /= norm;
    }
    let w_dot_w: f64 = w_true.iter().map(|v| v * v).sum();

    let mut data = Vec::with_capacity(cfg.n * cfg.d);
    let mut labels = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let mut x: Vec<f64> = (0..cfg.d).map(|_| rng.sample(StandardNormal)).collect();
        let s: f64 = x.iter().zip(&w_true).map(|(a, b)| a * b).sum();
        let y = if s >= 0.0 { 1.0 } else { -1.0 };
        // shift along y*w_true until the margin clears; the loop guards the
        // certificate against the last rounding error
        loop {
            let s: f64 = x.iter().zip(&w_true).map(|(a, b)| a * b).sum();
            if y * s >= cfg.margin {
                break;
            }
            let shift = (cfg.margin - y * s) / w_dot_w * (1.0 + 1e-12) + f64::MIN_POSITIVE;
            for (xj, wj) in x.iter_mut().zip(&w_true) {
                *xj += shift * y * wj;
            }
        }
        data.extend_from_slice(&x);
        labels.push(y);
    }

    let ds = Dataset::new(
        FeatureMatrix::Dense {
            rows: cfg.n,
            cols: cfg.d,
            data,
        },
        labels,
    )?;
    Ok((ds, Weights::new(w_true)))
}

/// Smallest y_i <x_i, w> over the dataset.
pub fn min_margin(ds: &Dataset, w: &Weights) -> f64 {
    (0..ds.num_examples())
        .map(|i| ds.label(i) * ds.features().row_dot(i, w))
        .fold(f64::INFINITY, f64::min)
}
