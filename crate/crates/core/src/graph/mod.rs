//! Canonical undirected graph with class labels and dense node features.
//!
//! The adjacency is stored in compressed sparse row form with sorted,
//! deduplicated neighbor lists. Every edge appears in both endpoint rows and
//! self-loops are never stored; they only enter through the renormalized
//! affinity operators.

mod bundle;

pub use bundle::{read_bundle, write_bundle, BundleMeta};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_classes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    labels: Vec<usize>,
    features: DMatrix<f64>,
}

impl Graph {
    /// Builds the canonical graph from an arbitrary undirected edge list.
    ///
    /// Both orientations and repeated pairs collapse to one edge. The number
    /// of classes is `max(label) + 1` and every class in that range must own
    /// at least one node.
    pub fn build(edges: &[(usize, usize)], labels: Vec<usize>, features: DMatrix<f64>) -> Result<Self> {
        let num_nodes = labels.len();
        if num_nodes == 0 {
            return Err(Error::DimensionMismatch("graph needs at least one node".into()));
        }
        if features.nrows() != num_nodes {
            return Err(Error::DimensionMismatch(format!(
                "features have {} rows but there are {} labels",
                features.nrows(),
                num_nodes
            )));
        }
        if features.ncols() == 0 {
            return Err(Error::DimensionMismatch("features need at least one column".into()));
        }
        let num_classes = labels.iter().copied().max().unwrap_or(0) + 1;
        Self::build_with_classes(edges, labels, features, num_classes)
    }

    /// Like [`Graph::build`] with an explicit class count.
    pub fn build_with_classes(
        edges: &[(usize, usize)],
        labels: Vec<usize>,
        features: DMatrix<f64>,
        num_classes: usize,
    ) -> Result<Self> {
        let num_nodes = labels.len();
        if features.nrows() != num_nodes {
            return Err(Error::DimensionMismatch(format!(
                "features have {} rows but there are {} labels",
                features.nrows(),
                num_nodes
            )));
        }
        let mut seen = vec![false; num_classes];
        for (node, &label) in labels.iter().enumerate() {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    node,
                    label,
                    num_classes,
                });
            }
            seen[label] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyClass(missing));
        }

        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= num_nodes {
                    return Err(Error::EndpointOutOfRange { node, num_nodes });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            degree[u] += 1;
            degree[v] += 1;
        }

        let mut row_offsets = Vec::with_capacity(num_nodes + 1);
        row_offsets.push(0);
        for d in &degree {
            row_offsets.push(row_offsets.last().unwrap() + d);
        }
        let mut cursor = row_offsets[..num_nodes].to_vec();
        let mut cols = vec![0usize; row_offsets[num_nodes]];
        for &(u, v) in edges {
            cols[cursor[u]] = v;
            cursor[u] += 1;
            cols[cursor[v]] = u;
            cursor[v] += 1;
        }

        // sort + dedup each row, then compact
        let mut col_indices = Vec::with_capacity(cols.len());
        let mut compact_offsets = Vec::with_capacity(num_nodes + 1);
        compact_offsets.push(0);
        for i in 0..num_nodes {
            let row = &mut cols[row_offsets[i]..row_offsets[i + 1]];
            row.sort_unstable();
            let mut last = None;
            for &c in row.iter() {
                if last != Some(c) {
                    col_indices.push(c);
                    last = Some(c);
                }
            }
            compact_offsets.push(col_indices.len());
        }

        Ok(Graph {
            num_classes,
            row_offsets: compact_offsets,
            col_indices,
            labels,
            features,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.col_indices.len() / 2
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[node]..self.row_offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.row_offsets[node + 1] - self.row_offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.row_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Undirected edges as `(u, v)` pairs with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Node counts per class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes];
        for &y in &self.labels {
            sizes[y] += 1;
        }
        sizes
    }

    /// One-hot label matrix, built on demand.
    pub fn one_hot_labels(&self) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(self.num_nodes(), self.num_classes);
        for (i, &c) in self.labels.iter().enumerate() {
            y[(i, c)] = 1.0;
        }
        y
    }

    /// Same structure and labels with a different feature matrix.
    pub fn with_features(&self, features: DMatrix<f64>) -> Result<Self> {
        if features.nrows() != self.num_nodes() || features.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "replacement features are {}x{}, graph has {} nodes",
                features.nrows(),
                features.ncols(),
                self.num_nodes()
            )));
        }
        Ok(Graph {
            features,
            ..self.clone()
        })
    }

    pub fn affinity(&self, kind: AffinityKind) -> Result<AffinityOperator> {
        AffinityOperator::new(self, kind)
    }

    /// Product of the selected affinity operator with `m`, computed sparsely.
    pub fn apply_affinity(&self, kind: AffinityKind, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.affinity(kind)?.apply(m)
    }
}

/// Normalized adjacency variants used as aggregation operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AffinityKind {
    /// `D^-1 A`
    Rw,
    /// `D^-1/2 A D^-1/2`
    Sym,
    /// `(D+I)^-1 (A+I)`
    RenormRw,
    /// `(D+I)^-1/2 (A+I) (D+I)^-1/2`
    RenormSym,
}

impl AffinityKind {
    pub fn is_renormalized(self) -> bool {
        matches!(self, AffinityKind::RenormRw | AffinityKind::RenormSym)
    }
}

/// Weighted CSR operator; RENORM variants carry the self-loop explicitly.
#[derive(Debug, Clone)]
pub struct AffinityOperator {
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl AffinityOperator {
    pub fn new(g: &Graph, kind: AffinityKind) -> Result<Self> {
        let n = g.num_nodes();
        let loop_weight = if kind.is_renormalized() { 1.0 } else { 0.0 };
        let deg: Vec<f64> = g.degrees().into_iter().map(|d| d as f64 + loop_weight).collect();
        if !kind.is_renormalized() {
            if let Some(i) = deg.iter().position(|&d| d == 0.0) {
                return Err(Error::IsolatedNodeWithoutRenorm(i));
            }
        }
        let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
        let weight = |i: usize, j: usize| match kind {
            AffinityKind::Rw | AffinityKind::RenormRw => 1.0 / deg[i],
            AffinityKind::Sym | AffinityKind::RenormSym => inv_sqrt[i] * inv_sqrt[j],
        };

        let extra = if kind.is_renormalized() { n } else { 0 };
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::with_capacity(g.col_indices.len() + extra);
        let mut values = Vec::with_capacity(g.col_indices.len() + extra);
        row_offsets.push(0);
        for i in 0..n {
            let mut self_done = !kind.is_renormalized();
            for &j in g.neighbors(i) {
                if !self_done && j > i {
                    col_indices.push(i);
                    values.push(weight(i, i));
                    self_done = true;
                }
                col_indices.push(j);
                values.push(weight(i, j));
            }
            if !self_done {
                col_indices.push(i);
                values.push(weight(i, i));
            }
            row_offsets.push(col_indices.len());
        }
        Ok(AffinityOperator {
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn apply(&self, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.num_rows();
        if m.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator has {} rows, matrix has {}",
                n,
                m.nrows()
            )));
        }
        let mut out = DMatrix::zeros(n, m.ncols());
        for k in 0..m.ncols() {
            let src = m.column(k);
            let src = src.as_slice();
            let dst = out.column_mut(k);
            let mut dst = dst;
            let dst = dst.as_mut_slice();
            for i in 0..n {
                let lo = self.row_offsets[i];
                let hi = self.row_offsets[i + 1];
                let mut acc = 0.0;
                for (&j, &w) in self.col_indices[lo..hi].iter().zip(&self.values[lo..hi]) {
                    acc += w * src[j];
                }
                dst[i] = acc;
            }
        }
        Ok(out)
    }

    /// Dense copy, for tests and small graphs only.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.num_rows();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, w) in self.row(i) {
                a[(i, j)] = w;
            }
        }
        a
    }
}
