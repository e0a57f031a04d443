//! Dense weight vector with the handful of BLAS-1 style operations the
//! optimizers need. Operations are written as explicit loops so trajectories
//! are bitwise reproducible across runs with the same seed.

use serde::{Deserialize, Serialize};
use std::ops::{Deref, Index};

use crate::error::{Error, Result};

/// Dense iterate/gradient/buffer vector of fixed dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(values: Vec<f64>) -> Self {
        Weights(values)
    }

    pub fn zeros(dim: usize) -> Self {
        Weights(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Weights) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `self += coeff * other`, coordinatewise.
    pub fn add_scaled(&mut self, coeff: f64, other: &Weights) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += coeff * b;
        }
    }

    pub fn scale(&mut self, coeff: f64) {
        for a in &mut self.0 {
            *a *= coeff;
        }
    }

    /// `self - other` as a new vector.
    pub fn minus(&self, other: &Weights) -> Weights {
        debug_assert_eq!(self.dim(), other.dim());
        Weights(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl Deref for Weights {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Weights {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Weights {
    fn from(v: Vec<f64>) -> Self {
        Weights(v)
    }
}
