//! Feature- and aggregation-based similarity metrics.

use crate::error::{Error, Result};
use crate::graph::{AffinityKind, Graph};

/// Mean cosine similarity of endpoint features over edges. An edge with a
/// zero feature vector on either side contributes 0.
pub fn generalized_edge_homophily(g: &Graph) -> Result<f64> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let x = g.features();
    let norms: Vec<f64> = x.row_iter().map(|r| r.norm()).collect();
    let total: f64 = g
        .edges()
        .map(|(u, v)| {
            if norms[u] == 0.0 || norms[v] == 0.0 {
                0.0
            } else {
                x.row(u).dot(&x.row(v)) / (norms[u] * norms[v])
            }
        })
        .sum();
    Ok(total / g.num_edges() as f64)
}

/// `mean_same >= mean_other`, with ties up to rounding counted as satisfied.
pub(crate) fn favors_same(mean_same: f64, mean_other: f64) -> bool {
    let scale = mean_same.abs().max(mean_other.abs());
    mean_same >= mean_other - 1e-12 * scale
}

/// Fraction of nodes whose post-aggregation similarity `S = ÂY(ÂY)^T` is on
/// average at least as large towards same-label nodes (itself included) as
/// towards other-label nodes.
///
/// Uses per-class column sums of `ÂY`, so `S` is never formed.
pub fn aggregation_homophily(g: &Graph, affinity: AffinityKind) -> Result<f64> {
    let n = g.num_nodes();
    let c = g.num_classes();
    let z = g.apply_affinity(affinity, &g.one_hot_labels())?;
    let sizes = g.class_sizes();

    // class_sums[k] = sum of rows of z over nodes with label k
    let mut class_sums = vec![vec![0.0; c]; c];
    for (v, &k) in g.labels().iter().enumerate() {
        for j in 0..c {
            class_sums[k][j] += z[(v, j)];
        }
    }
    let totals: Vec<f64> = (0..c).map(|j| class_sums.iter().map(|s| s[j]).sum()).collect();

    let mut satisfied = 0usize;
    for (v, &k) in g.labels().iter().enumerate() {
        let others = n - sizes[k];
        if others == 0 {
            satisfied += 1;
            continue;
        }
        let mut same = 0.0;
        let mut other = 0.0;
        for j in 0..c {
            same += z[(v, j)] * class_sums[k][j];
            other += z[(v, j)] * (totals[j] - class_sums[k][j]);
        }
        if favors_same(same / sizes[k] as f64, other / others as f64) {
            satisfied += 1;
        }
    }
    Ok(satisfied as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn identical_features_give_unit_similarity() {
        let x = DMatrix::from_element(3, 2, 0.7);
        let g = Graph::build(&[(0, 1), (1, 2)], vec![0, 1, 0], x).unwrap();
        assert!((generalized_edge_homophily(&g).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_hot_features_on_triangle() {
        let labels = vec![0, 0, 1];
        let x = DMatrix::from_fn(3, 2, |i, j| if labels[i] == j { 1.0 } else { 0.0 });
        let g = Graph::build(&[(0, 1), (1, 2), (0, 2)], labels, x).unwrap();
        assert!((generalized_edge_homophily(&g).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_feature_edges_contribute_zero() {
        let x = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 1.0]);
        let g = Graph::build(&[(0, 1), (0, 2)], vec![0, 1, 0], x).unwrap();
        assert_eq!(generalized_edge_homophily(&g).unwrap(), 0.5);
    }

    #[test]
    fn aggregation_homophily_of_disjoint_cliques_is_one() {
        let x = DMatrix::zeros(6, 1);
        let g = Graph::build(&[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], vec![0, 0, 0, 1, 1, 1], x).unwrap();
        assert_eq!(aggregation_homophily(&g, AffinityKind::RenormRw).unwrap(), 1.0);
    }

    #[test]
    fn single_class_is_vacuously_homophilic() {
        let g = Graph::build(&[(0, 1), (1, 2)], vec![0, 0, 0], DMatrix::zeros(3, 1)).unwrap();
        assert_eq!(aggregation_homophily(&g, AffinityKind::RenormRw).unwrap(), 1.0);
    }
}
