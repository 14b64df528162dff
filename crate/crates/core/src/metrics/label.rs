//! Feature-independent metrics built from labels and structure alone.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn require_edges(g: &Graph) -> Result<()> {
    if g.num_edges() == 0 {
        Err(Error::EmptyEdgeSet)
    } else {
        Ok(())
    }
}

fn same_label_neighbors(g: &Graph, v: usize) -> usize {
    let y = g.labels();
    g.neighbors(v).iter().filter(|&&u| y[u] == y[v]).count()
}

/// Fraction of undirected edges joining same-label endpoints.
pub fn edge_homophily(g: &Graph) -> Result<f64> {
    require_edges(g)?;
    let y = g.labels();
    let intra = g.edges().filter(|&(u, v)| y[u] == y[v]).count();
    Ok(intra as f64 / g.num_edges() as f64)
}

/// Mean same-label neighbor fraction over nodes with at least one neighbor.
pub fn node_homophily(g: &Graph) -> Result<f64> {
    let mut total = 0.0;
    let mut counted = 0usize;
    for v in 0..g.num_nodes() {
        let d = g.degree(v);
        if d == 0 {
            continue;
        }
        total += same_label_neighbors(g, v) as f64 / d as f64;
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(total / counted as f64)
}

/// Per-class homophily `h_k`: same-label neighbor count over degree mass of
/// class `k` (0 when the class has no incident edges).
pub fn class_wise_homophily(g: &Graph) -> Vec<f64> {
    let c = g.num_classes();
    let mut same = vec![0usize; c];
    let mut mass = vec![0usize; c];
    for v in 0..g.num_nodes() {
        let k = g.labels()[v];
        same[k] += same_label_neighbors(g, v);
        mass[k] += g.degree(v);
    }
    same.iter()
        .zip(&mass)
        .map(|(&s, &m)| if m == 0 { 0.0 } else { s as f64 / m as f64 })
        .collect()
}

pub fn class_homophily(g: &Graph) -> Result<f64> {
    require_edges(g)?;
    let c = g.num_classes();
    if c < 2 {
        return Err(Error::DegenerateDenominator("class_homophily"));
    }
    let n = g.num_nodes() as f64;
    let sizes = g.class_sizes();
    let sum: f64 = class_wise_homophily(g)
        .iter()
        .zip(&sizes)
        .map(|(&h, &size)| (h - size as f64 / n).max(0.0))
        .sum();
    Ok(sum / (c - 1) as f64)
}

/// Degree-weighted class distribution `p̄_c = sum_{y_v = c} d_v / 2|E|`.
pub fn degree_class_distribution(g: &Graph) -> Result<Vec<f64>> {
    require_edges(g)?;
    let mut mass = vec![0usize; g.num_classes()];
    for v in 0..g.num_nodes() {
        mass[g.labels()[v]] += g.degree(v);
    }
    let total = 2.0 * g.num_edges() as f64;
    Ok(mass.into_iter().map(|m| m as f64 / total).collect())
}

pub fn adjusted_homophily(g: &Graph) -> Result<f64> {
    let h_edge = edge_homophily(g)?;
    let expected: f64 = degree_class_distribution(g)?.iter().map(|p| p * p).sum();
    let denom = 1.0 - expected;
    if denom <= 0.0 {
        return Err(Error::DegenerateDenominator("adjusted_homophily"));
    }
    Ok((h_edge - expected) / denom)
}

/// Joint distribution of endpoint labels over both edge orientations.
pub fn edge_label_joint(g: &Graph) -> Result<DMatrix<f64>> {
    require_edges(g)?;
    let c = g.num_classes();
    let y = g.labels();
    let mut joint = DMatrix::zeros(c, c);
    for (u, v) in g.edges() {
        joint[(y[u], y[v])] += 1.0;
        joint[(y[v], y[u])] += 1.0;
    }
    Ok(joint / (2.0 * g.num_edges() as f64))
}

/// Normalized mutual information between the labels of edge endpoints:
/// `-sum p_ab ln(p_ab / (p̄_a p̄_b)) / sum p̄_c ln p̄_c`.
pub fn label_informativeness(g: &Graph) -> Result<f64> {
    let joint = edge_label_joint(g)?;
    let c = g.num_classes();
    let marginal: Vec<f64> = (0..c).map(|a| joint.row(a).sum()).collect();
    let mut numer = 0.0;
    for a in 0..c {
        for b in 0..c {
            let p = joint[(a, b)];
            if p > 0.0 {
                numer += p * (p / (marginal[a] * marginal[b])).ln();
            }
        }
    }
    let denom: f64 = marginal.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum();
    if denom == 0.0 {
        return Err(Error::DegenerateDenominator("label_informativeness"));
    }
    Ok(-numer / denom)
}

/// Row `i` holds the neighbor-label proportions of the `i`-th node of `class`
/// (in node order); isolated nodes give a zero row.
pub fn neighbor_label_matrix(g: &Graph, class: usize) -> DMatrix<f64> {
    let c = g.num_classes();
    let members: Vec<usize> = (0..g.num_nodes()).filter(|&v| g.labels()[v] == class).collect();
    let mut a = DMatrix::zeros(members.len(), c);
    for (row, &v) in members.iter().enumerate() {
        let d = g.degree(v);
        if d == 0 {
            continue;
        }
        for &u in g.neighbors(v) {
            a[(row, g.labels()[u])] += 1.0;
        }
        for k in 0..c {
            a[(row, k)] /= d as f64;
        }
    }
    a
}

/// Entropy of the normalized singular values, divided by `ln C`.
fn singular_value_entropy(sigma: &[f64], num_classes: usize) -> f64 {
    let max = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = max * 1e-12;
    let kept: Vec<f64> = sigma.iter().copied().filter(|&s| s > cutoff).collect();
    let total: f64 = kept.iter().sum();
    let entropy: f64 = kept
        .iter()
        .map(|s| {
            let p = s / total;
            -p * p.ln()
        })
        .sum();
    entropy / (num_classes as f64).ln()
}

/// Returns `(H_neighbor, 1 - H_neighbor)`; lower raw values mean more
/// identifiable neighborhoods.
pub fn neighbor_identifiability(g: &Graph) -> Result<(f64, f64)> {
    let c = g.num_classes();
    if c < 2 {
        return Err(Error::DegenerateDenominator("neighbor_identifiability"));
    }
    let n = g.num_nodes() as f64;
    let mut raw = 0.0;
    for k in 0..c {
        let a = neighbor_label_matrix(g, k);
        let sigma = a.singular_values();
        if sigma.iter().all(|&s| s == 0.0) {
            return Err(Error::EmptyClassNeighborhoods(k));
        }
        let h_k = singular_value_entropy(sigma.as_slice(), c);
        raw += a.nrows() as f64 / n * h_k;
    }
    Ok((raw, 1.0 - raw))
}
