use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::read_bundle;
use crate::seed::Rng;

/// Where per-class node features come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSource {
    /// Class means drawn from `N(0, class_mean_spread^2)` per dimension,
    /// node features from `N(class mean, stdev^2)`.
    Gaussian { dim: usize, class_mean_spread: f64, stdev: f64 },
    /// Each node copies the features of a uniformly drawn node of the same
    /// class in a stored graph bundle.
    BaseDataset { path: PathBuf },
}

impl Default for FeatureSource {
    fn default() -> Self {
        FeatureSource::Gaussian { dim: 16, class_mean_spread: 1.0, stdev: 3.0 }
    }
}

fn normal(mean: f64, stdev: f64) -> Result<Normal<f64>> {
    Normal::new(mean, stdev).map_err(|e| Error::InvalidSpec(format!("normal({mean}, {stdev}): {e}")))
}

impl FeatureSource {
    pub fn validate(&self) -> Result<()> {
        match self {
            FeatureSource::Gaussian { dim, class_mean_spread, stdev } => {
                if *dim == 0 {
                    return Err(Error::InvalidSpec("gaussian feature dim must be positive".into()));
                }
                if !(*class_mean_spread >= 0.0) || !(*stdev >= 0.0) {
                    return Err(Error::InvalidSpec("gaussian spreads must be nonnegative".into()));
                }
                Ok(())
            }
            FeatureSource::BaseDataset { .. } => Ok(()),
        }
    }

    pub fn sample(&self, labels: &[usize], num_classes: usize, rng: &mut Rng) -> Result<DMatrix<f64>> {
        match self {
            FeatureSource::Gaussian { dim, class_mean_spread, stdev } => {
                let spread = normal(0.0, *class_mean_spread)?;
                let means = DMatrix::from_fn(num_classes, *dim, |_, _| spread.sample(rng));
                let noise = normal(0.0, *stdev)?;
                Ok(DMatrix::from_fn(labels.len(), *dim, |i, f| means[(labels[i], f)] + noise.sample(rng)))
            }
            FeatureSource::BaseDataset { path } => {
                let (base, _) = read_bundle(path)?;
                if base.num_classes() < num_classes {
                    return Err(Error::InvalidSpec(format!(
                        "base dataset {} has {} classes, {num_classes} needed",
                        path.display(),
                        base.num_classes()
                    )));
                }
                let mut pools = vec![Vec::new(); base.num_classes()];
                for (v, &c) in base.labels().iter().enumerate() {
                    pools[c].push(v);
                }
                let x = base.features();
                let mut out = DMatrix::zeros(labels.len(), x.ncols());
                for (i, &c) in labels.iter().enumerate() {
                    let src = pools[c][rng.random_range(0..pools[c].len())];
                    out.row_mut(i).copy_from(&x.row(src));
                }
                Ok(out)
            }
        }
    }
}

/// 2-D Gaussian features with class means evenly spaced on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CircleFeatures {
    pub radius: f64,
    pub stdev: f64,
}

impl Default for CircleFeatures {
    fn default() -> Self {
        CircleFeatures { radius: 1.0, stdev: 0.6 }
    }
}

impl CircleFeatures {
    pub fn sample(&self, labels: &[usize], num_classes: usize, rng: &mut Rng) -> Result<DMatrix<f64>> {
        let noise = normal(0.0, self.stdev)?;
        let angle = |c: usize| std::f64::consts::TAU * c as f64 / num_classes as f64;
        Ok(DMatrix::from_fn(labels.len(), 2, |i, f| {
            let a = angle(labels[i]);
            let center = if f == 0 { a.cos() } else { a.sin() };
            self.radius * center + noise.sample(rng)
        }))
    }
}
