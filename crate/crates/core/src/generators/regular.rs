use std::collections::HashSet;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::FeatureSource;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// The 28 target edge-homophily levels of the standard sweep.
pub const STANDARD_LEVELS: [f64; 28] = [
    0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45,
    0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegularGraphSpec {
    pub target_edge_homophily: f64,
    pub classes: usize,
    pub nodes_per_class: usize,
    pub intra_edges_per_class: usize,
    pub features: FeatureSource,
    pub seed: u64,
}

impl Default for RegularGraphSpec {
    fn default() -> Self {
        RegularGraphSpec {
            target_edge_homophily: 0.5,
            classes: 5,
            nodes_per_class: 400,
            intra_edges_per_class: 800,
            features: FeatureSource::default(),
            seed: 0,
        }
    }
}

impl RegularGraphSpec {
    /// `round(intra / h - intra)` inter-class edges initiated by each class.
    pub fn inter_edges_per_class(&self) -> usize {
        let intra = self.intra_edges_per_class as f64;
        (intra / self.target_edge_homophily - intra).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.target_edge_homophily;
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::InvalidSpec(format!("target edge homophily {h} outside (0, 1]")));
        }
        if self.classes < 2 || self.nodes_per_class < 2 {
            return Err(Error::InvalidSpec("need at least 2 classes of at least 2 nodes".into()));
        }
        if self.intra_edges_per_class == 0 {
            return Err(Error::InvalidSpec("intra_edges_per_class must be positive".into()));
        }
        self.features.validate()
    }
}

/// Maps a rank in `0..n(n-1)/2` to the pair `(a, b)`, `a < b`, in row-major
/// order of the strict upper triangle.
fn unrank_pair(rank: usize, n: usize) -> (usize, usize) {
    // row a starts at a*n - a(a+1)/2
    let start = |a: usize| a * n - a * (a + 1) / 2;
    let (mut lo, mut hi) = (0, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if start(mid) <= rank {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, lo + 1 + rank - start(lo))
}

/// Graph with fixed per-class intra and inter edge budgets.
///
/// Class `k` owns nodes `k*n .. (k+1)*n`. Each class receives exactly
/// `intra_edges_per_class` distinct intra edges and initiates exactly
/// `inter_edges_per_class()` inter edges that are distinct from every edge
/// sampled before, so the realized edge homophily is the target up to
/// rounding of the budget.
pub fn generate_regular(spec: &RegularGraphSpec) -> Result<Graph> {
    spec.validate()?;
    let c = spec.classes;
    let n = spec.nodes_per_class;
    let total = c * n;
    let intra_capacity = n * (n - 1) / 2;
    if spec.intra_edges_per_class > intra_capacity {
        return Err(Error::EdgeBudgetExceedsCapacity {
            requested: spec.intra_edges_per_class,
            capacity: intra_capacity,
        });
    }
    let inter = spec.inter_edges_per_class();
    let total_inter_capacity = n * n * c * (c - 1) / 2;
    if inter * c > total_inter_capacity {
        return Err(Error::EdgeBudgetExceedsCapacity { requested: inter * c, capacity: total_inter_capacity });
    }

    let mut rng = seed::rng(spec.seed);
    let labels: Vec<usize> = (0..total).map(|v| v / n).collect();
    let mut edges = Vec::with_capacity(c * (spec.intra_edges_per_class + inter));
    for k in 0..c {
        for rank in index::sample(&mut rng, intra_capacity, spec.intra_edges_per_class) {
            let (a, b) = unrank_pair(rank, n);
            edges.push((k * n + a, k * n + b));
        }
    }

    let key = |u: usize, v: usize| (u.min(v) * total + u.max(v)) as u64;
    let mut seen: HashSet<u64> = HashSet::with_capacity(inter * c);
    // inter edges already incident to each class
    let mut incident = vec![0usize; c];
    for k in 0..c {
        let free = n * (total - n) - incident[k];
        if inter > free {
            return Err(Error::EdgeBudgetExceedsCapacity { requested: inter, capacity: free });
        }
        let mut added = 0;
        while added < inter {
            let u = k * n + rng.random_range(0..n);
            let mut other = rng.random_range(0..c - 1);
            if other >= k {
                other += 1;
            }
            let v = other * n + rng.random_range(0..n);
            if seen.insert(key(u, v)) {
                edges.push((u, v));
                incident[k] += 1;
                incident[other] += 1;
                added += 1;
            }
        }
    }

    let features = spec.features.sample(&labels, c, &mut rng)?;
    Graph::build_with_classes(&edges, labels, features, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::edge_homophily;

    fn small(h: f64) -> RegularGraphSpec {
        RegularGraphSpec {
            target_edge_homophily: h,
            classes: 2,
            nodes_per_class: 10,
            intra_edges_per_class: 20,
            features: FeatureSource::Gaussian { dim: 4, class_mean_spread: 1.0, stdev: 1.0 },
            seed: 7,
        }
    }

    #[test]
    fn unrank_enumerates_upper_triangle() {
        let n = 7;
        let pairs: Vec<_> = (0..n * (n - 1) / 2).map(|r| unrank_pair(r, n)).collect();
        let expected: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        assert_eq!(pairs, expected);
    }

    #[test]
    fn budgets_are_exact() {
        let spec = small(0.5);
        assert_eq!(spec.inter_edges_per_class(), 20);
        let g = generate_regular(&spec).unwrap();
        assert_eq!(g.num_nodes(), 20);
        assert_eq!(g.num_features(), 4);
        let y = g.labels();
        for k in 0..2 {
            let intra = g.edges().filter(|&(u, v)| y[u] == k && y[v] == k).count();
            assert_eq!(intra, 20);
        }
        assert_eq!(g.num_edges(), 80);
        assert_eq!(edge_homophily(&g).unwrap(), 0.5);
    }

    #[test]
    fn intra_budget_above_capacity_is_rejected() {
        let mut spec = small(0.5);
        spec.intra_edges_per_class = 46;
        assert!(matches!(
            generate_regular(&spec),
            Err(Error::EdgeBudgetExceedsCapacity { requested: 46, capacity: 45 })
        ));
    }

    #[test]
    fn inter_budget_above_capacity_is_rejected() {
        // 20/0.1 - 20 = 180 inter edges per class, only 100 cross pairs exist
        assert!(matches!(generate_regular(&small(0.1)), Err(Error::EdgeBudgetExceedsCapacity { .. })));
    }

    #[test]
    fn same_seed_same_graph() {
        let a = generate_regular(&small(0.7)).unwrap();
        let b = generate_regular(&small(0.7)).unwrap();
        assert_eq!(a.edge_list(), b.edge_list());
        assert_eq!(a.features(), b.features());
    }
}
