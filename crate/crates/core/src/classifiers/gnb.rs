//! Gaussian naive Bayes with variance smoothing.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative variance smoothing applied on top of the largest feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GaussianNb {
    log_prior: Vec<f64>,
    // num_classes x num_features
    means: DMatrix<f64>,
    vars: DMatrix<f64>,
}

impl GaussianNb {
    pub fn fit(x: &DMatrix<f64>, y: &[usize], num_classes: usize) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} training rows but {} labels",
                x.nrows(),
                y.len()
            )));
        }
        let f = x.ncols();
        let mut counts = vec![0usize; num_classes];
        let mut means = DMatrix::zeros(num_classes, f);
        for (i, &c) in y.iter().enumerate() {
            counts[c] += 1;
            for j in 0..f {
                means[(c, j)] += x[(i, j)];
            }
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return Err(Error::ClassMissing(c));
        }
        for c in 0..num_classes {
            for j in 0..f {
                means[(c, j)] /= counts[c] as f64;
            }
        }
        let mut vars = DMatrix::zeros(num_classes, f);
        for (i, &c) in y.iter().enumerate() {
            for j in 0..f {
                let d = x[(i, j)] - means[(c, j)];
                vars[(c, j)] += d * d;
            }
        }

        // epsilon is relative to the largest per-feature variance of the whole training set
        let n = x.nrows() as f64;
        let mut max_var = 0.0f64;
        for j in 0..f {
            let col = x.column(j);
            let mu = col.sum() / n;
            let v = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
            max_var = max_var.max(v);
        }
        let eps = (VAR_SMOOTHING * max_var).max(f64::MIN_POSITIVE);
        for c in 0..num_classes {
            for j in 0..f {
                vars[(c, j)] = vars[(c, j)] / counts[c] as f64 + eps;
            }
        }

        let log_prior = counts.iter().map(|&k| (k as f64 / n).ln()).collect();
        Ok(GaussianNb {
            log_prior,
            means,
            vars,
        })
    }

    pub fn joint_log_likelihood(&self, row: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
        (0..self.log_prior.len())
            .map(|c| {
                let mut ll = self.log_prior[c];
                for (j, v) in row.clone().enumerate() {
                    let var = self.vars[(c, j)];
                    let d = v - self.means[(c, j)];
                    ll -= 0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var);
                }
                ll
            })
            .collect()
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        (0..x.nrows())
            .map(|i| argmax(&self.joint_log_likelihood(x.row(i).iter().copied())))
            .collect()
    }
}

/// Index of the largest value; the lowest index wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn gnb_fit_predict(
    train_x: &DMatrix<f64>,
    train_y: &[usize],
    test_x: &DMatrix<f64>,
    num_classes: usize,
) -> Result<Vec<usize>> {
    Ok(GaussianNb::fit(train_x, train_y, num_classes)?.predict(test_x))
}
