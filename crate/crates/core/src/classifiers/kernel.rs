//! Kernel ridge regression on one-hot targets with linear and ReLU NNGP kernels.
//!
//! The linear kernel is `x.x' / F`. The nonlinear kernel is the covariance of
//! an infinite-width one-hidden-layer ReLU network on top of it (the
//! first-order arc-cosine kernel):
//!
//! `k(x, x') = sqrt(k0(x,x) k0(x',x')) / (2 pi) * (sin t + (pi - t) cos t)`
//!
//! with `cos t = k0(x,x') / sqrt(k0(x,x) k0(x',x'))`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::gnb::argmax;
use crate::error::{Error, Result};

/// Ridge = `RIDGE_SCALE * mean(diag K_train)`.
pub const RIDGE_SCALE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    ReluNngp,
}

fn base(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

fn relu_from_base(k_ab: f64, k_aa: f64, k_bb: f64) -> f64 {
    let norm = (k_aa * k_bb).sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let cos = (k_ab / norm).clamp(-1.0, 1.0);
    let theta = cos.acos();
    norm / (2.0 * PI) * (theta.sin() + (PI - theta) * cos)
}

impl Kernel {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => base(a, b),
            Kernel::ReluNngp => relu_from_base(base(a, b), base(a, a), base(b, b)),
        }
    }

    /// Gram matrix between the rows of `a` and the rows of `b`.
    pub fn matrix(self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let f = a.ncols() as f64;
        let mut k = (a * b.transpose()) / f;
        if self == Kernel::ReluNngp {
            let self_a: Vec<f64> = a.row_iter().map(|r| r.norm_squared() / f).collect();
            let self_b: Vec<f64> = b.row_iter().map(|r| r.norm_squared() / f).collect();
            for j in 0..k.ncols() {
                for i in 0..k.nrows() {
                    k[(i, j)] = relu_from_base(k[(i, j)], self_a[i], self_b[j]);
                }
            }
        }
        k
    }

    /// Mean of `k(x, x)` over rows, computed without the full Gram matrix.
    pub fn mean_self_similarity(self, x: &DMatrix<f64>) -> f64 {
        let f = x.ncols() as f64;
        let scale = match self {
            Kernel::Linear => 1.0,
            Kernel::ReluNngp => 0.5,
        };
        let total: f64 = x.row_iter().map(|r| r.norm_squared() / f).sum();
        scale * total / x.nrows() as f64
    }

    pub fn default_ridge(self, train_x: &DMatrix<f64>) -> f64 {
        (RIDGE_SCALE * self.mean_self_similarity(train_x)).max(1e-12)
    }
}

/// Solves `(K + ridge I) alpha = Y` and predicts `argmax(K_test alpha)` per row.
pub fn kernel_regression_predict(
    train_x: &DMatrix<f64>,
    train_y_onehot: &DMatrix<f64>,
    test_x: &DMatrix<f64>,
    kernel: Kernel,
    ridge: f64,
) -> Result<Vec<usize>> {
    if !(ridge > 0.0) {
        return Err(Error::InvalidSpec(format!("ridge must be positive, got {ridge}")));
    }
    if train_x.nrows() != train_y_onehot.nrows() || train_x.ncols() != test_x.ncols() {
        return Err(Error::DimensionMismatch("kernel regression inputs disagree".into()));
    }
    let mut k = kernel.matrix(train_x, train_x);
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    for i in 0..k.nrows() {
        k[(i, i)] += ridge;
    }
    let chol = k.cholesky().ok_or(Error::SingularSystem)?;
    let alpha = chol.solve(train_y_onehot);
    let scores = kernel.matrix(test_x, train_x) * alpha;
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(scores
        .row_iter()
        .map(|r| argmax(&r.iter().copied().collect::<Vec<_>>()))
        .collect())
}
