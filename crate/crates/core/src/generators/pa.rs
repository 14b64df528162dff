use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::CircleFeatures;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// Default homophily coefficients of a preferential-attachment sweep.
pub const STANDARD_MU_LEVELS: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PaSpec {
    pub num_nodes: usize,
    pub classes: usize,
    /// Weight of same-class attachment; `1 - mu` goes to other classes.
    pub homophily_coefficient: f64,
    pub edges_per_new_node: usize,
    /// `w_d ∝ exp(-distance_decay * d)` over circular class distance `d`.
    pub distance_decay: f64,
    pub features: CircleFeatures,
    pub seed: u64,
}

impl Default for PaSpec {
    fn default() -> Self {
        PaSpec {
            num_nodes: 1000,
            classes: 5,
            homophily_coefficient: 0.5,
            edges_per_new_node: 4,
            distance_decay: 1.0,
            features: CircleFeatures::default(),
            seed: 0,
        }
    }
}

impl PaSpec {
    pub fn validate(&self) -> Result<()> {
        let mu = self.homophily_coefficient;
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidSpec(format!("homophily coefficient {mu} outside [0, 1]")));
        }
        if self.classes < 2 {
            return Err(Error::InvalidSpec("preferential attachment needs at least 2 classes".into()));
        }
        if self.edges_per_new_node == 0 {
            return Err(Error::InvalidSpec("edges_per_new_node must be at least 1".into()));
        }
        let min_nodes = self.classes * self.edges_per_new_node + self.edges_per_new_node;
        if self.num_nodes < min_nodes {
            return Err(Error::InvalidSpec(format!("need at least {min_nodes} nodes, got {}", self.num_nodes)));
        }
        if !self.distance_decay.is_finite() {
            return Err(Error::InvalidSpec("distance_decay must be finite".into()));
        }
        Ok(())
    }

    /// `w_d` for `d = 1..=C/2`, summing to 1; index 0 is unused.
    pub fn distance_weights(&self) -> Vec<f64> {
        let max_d = self.classes / 2;
        let mut w: Vec<f64> = (0..=max_d).map(|d| (-self.distance_decay * d as f64).exp()).collect();
        w[0] = 0.0;
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        w
    }
}

/// Shortest distance between two classes numbered around a circle.
pub fn class_distance(a: usize, b: usize, classes: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(classes - d)
}

/// Grows a graph from a `C`-cycle seed (one node per class). Each new node
/// draws a uniform class and links to `m` distinct existing nodes with
/// probability proportional to `(d_j + 1) * mu` for same-class `j` and
/// `(d_j + 1) * (1 - mu) * w_d` otherwise. When fewer than `m` nodes have
/// positive weight, it links to all of them.
pub fn generate_pa(spec: &PaSpec) -> Result<Graph> {
    spec.validate()?;
    let c = spec.classes;
    let n = spec.num_nodes;
    let m = spec.edges_per_new_node;
    let mu = spec.homophily_coefficient;
    let w = spec.distance_weights();
    let mut rng = seed::rng(spec.seed);

    let mut labels: Vec<usize> = (0..c).collect();
    let mut degree = vec![0usize; n];
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(c + n * m);
    let cycle_len = if c == 2 { 1 } else { c };
    for i in 0..cycle_len {
        let j = (i + 1) % c;
        edges.push((i, j));
        degree[i] += 1;
        degree[j] += 1;
    }

    let mut weights = Vec::with_capacity(n);
    for i in c..n {
        let y = rng.random_range(0..c);
        weights.clear();
        weights.extend((0..i).map(|j| {
            let affinity = if labels[j] == y { mu } else { (1.0 - mu) * w[class_distance(y, labels[j], c)] };
            (degree[j] + 1) as f64 * affinity
        }));
        let positive = weights.iter().filter(|&&p| p > 0.0).count();
        let targets = index::sample_weighted(&mut rng, i, |j| weights[j], m.min(positive))
            .map_err(|e| Error::InvalidSpec(format!("attachment weights: {e}")))?;
        for j in targets {
            edges.push((j, i));
            degree[j] += 1;
            degree[i] += 1;
        }
        labels.push(y);
    }

    let features = spec.features.sample(&labels, c, &mut rng)?;
    Graph::build(&edges, labels, features)
}
