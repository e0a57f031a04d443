//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use asls_core::{FiniteSumObjective, Weights};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// f_i(w) = 0.5 ||w - c_i||^2 with random centers.
pub struct RandomQuadratics {
    pub centers: Vec<Weights>,
}

impl RandomQuadratics {
    pub fn generate(n: usize, d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RandomQuadratics {
            centers: (0..n)
                .map(|_| Weights::new((0..d).map(|_| rng.sample(StandardNormal)).collect()))
                .collect(),
        }
    }
}

impl FiniteSumObjective for RandomQuadratics {
    fn num_components(&self) -> usize {
        self.centers.len()
    }
    fn dim(&self) -> usize {
        self.centers[0].dim()
    }
    fn component_value(&self, i: usize, w: &Weights) -> f64 {
        0.5 * w.minus(&self.centers[i]).norm_sq()
    }
    fn component_grad(&self, i: usize, w: &Weights) -> Weights {
        w.minus(&self.centers[i])
    }
}

/// Interpolating 1-D least squares: f_i(w) = 0.5 (a_i w - b_i)^2 with
/// b_i = a_i * w_star, so every component is minimized at w_star and f_i* = 0.
pub struct LeastSquares1D {
    pub coeffs: Vec<f64>,
    pub targets: Vec<f64>,
    pub w_star: f64,
}

impl LeastSquares1D {
    pub fn interpolating(n: usize, w_star: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..n)
            .map(|_| 0.2 + rng.random_range(0.0..3.0))
            .collect();
        let targets = coeffs.iter().map(|a| a * w_star).collect();
        LeastSquares1D {
            coeffs,
            targets,
            w_star,
        }
    }

    pub fn l_max(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).fold(0.0, f64::max)
    }
}

impl FiniteSumObjective for LeastSquares1D {
    fn num_components(&self) -> usize {
        self.coeffs.len()
    }
    fn dim(&self) -> usize {
        1
    }
    fn component_value(&self, i: usize, w: &Weights) -> f64 {
        let r = self.coeffs[i] * w[0] - self.targets[i];
        0.5 * r * r
    }
    fn component_grad(&self, i: usize, w: &Weights) -> Weights {
        let r = self.coeffs[i] * w[0] - self.targets[i];
        Weights::new(vec![self.coeffs[i] * r])
    }
    fn known_l_max(&self) -> Option<f64> {
        Some(self.l_max())
    }
}
