use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

const MAX_SPLIT_ATTEMPTS: usize = 10;

/// Disjoint train/validation/test node sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// Uniform random split of all nodes by `fractions` (train, val, test).
    ///
    /// Redraws the permutation when the training part misses a class.
    pub fn random(labels: &[usize], num_classes: usize, fractions: [f64; 3], seed: u64) -> Result<Self> {
        let total: f64 = fractions.iter().sum();
        if fractions.iter().any(|f| *f < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("split fractions {fractions:?} must sum to 1")));
        }
        let n = labels.len();
        let n_train = (fractions[0] * n as f64).round() as usize;
        let n_val = ((fractions[1] * n as f64).round() as usize).min(n - n_train);
        let mut rng = seed::rng(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut missing = 0;
        for _ in 0..MAX_SPLIT_ATTEMPTS {
            order.shuffle(&mut rng);
            let mut present = vec![false; num_classes];
            for &i in &order[..n_train] {
                present[labels[i]] = true;
            }
            match present.iter().position(|p| !p) {
                None => {
                    return Ok(Split {
                        train: order[..n_train].to_vec(),
                        val: order[n_train..n_train + n_val].to_vec(),
                        test: order[n_train + n_val..].to_vec(),
                    })
                }
                Some(c) => missing = c,
            }
        }
        Err(Error::ClassMissingFromTrainSplit(missing))
    }
}
