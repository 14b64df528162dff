//! Dense brute-force recomputation of every graph-based metric.

use homophily_bench::graph::{AffinityKind, Graph};
use homophily_bench::metrics::{
    adjusted_homophily, aggregation_homophily, class_homophily, edge_homophily, generalized_edge_homophily,
    label_informativeness, neighbor_identifiability, node_homophily,
};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Dense {
    pub n: usize,
    pub c: usize,
    pub adj: Vec<Vec<bool>>,
    pub y: Vec<usize>,
    pub x: Vec<Vec<f64>>,
}

impl Dense {
    pub fn new(n: usize, edges: &[(usize, usize)], y: &[usize], x: Vec<Vec<f64>>) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let c = y.iter().max().unwrap() + 1;
        Dense { n, c, adj, y: y.to_vec(), x }
    }

    pub fn graph(&self) -> Graph {
        let edges: Vec<(usize, usize)> =
            (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).filter(|&(i, j)| self.adj[i][j]).collect();
        let f = self.x[0].len();
        let x = DMatrix::from_fn(self.n, f, |i, j| self.x[i][j]);
        Graph::build(&edges, self.y.clone(), x).unwrap()
    }

    pub fn deg(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&a| a).count()
    }

    pub fn num_edges(&self) -> usize {
        (0..self.n).map(|i| self.deg(i)).sum::<usize>() / 2
    }

    pub fn h_edge(&self) -> Option<f64> {
        let (mut same, mut all) = (0, 0);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.adj[i][j] {
                    all += 1;
                    same += (self.y[i] == self.y[j]) as usize;
                }
            }
        }
        (all > 0).then(|| same as f64 / all as f64)
    }

    pub fn h_node(&self) -> Option<f64> {
        let fracs: Vec<f64> = (0..self.n)
            .filter(|&i| self.deg(i) > 0)
            .map(|i| {
                let same = (0..self.n).filter(|&j| self.adj[i][j] && self.y[j] == self.y[i]).count();
                same as f64 / self.deg(i) as f64
            })
            .collect();
        (!fracs.is_empty()).then(|| fracs.iter().sum::<f64>() / fracs.len() as f64)
    }

    pub fn h_class(&self) -> Option<f64> {
        if self.num_edges() == 0 || self.c < 2 {
            return None;
        }
        let mut total = 0.0;
        for k in 0..self.c {
            let members: Vec<usize> = (0..self.n).filter(|&i| self.y[i] == k).collect();
            let mass: usize = members.iter().map(|&i| self.deg(i)).sum();
            let same: usize =
                members.iter().map(|&i| (0..self.n).filter(|&j| self.adj[i][j] && self.y[j] == k).count()).sum();
            let h_k = if mass == 0 { 0.0 } else { same as f64 / mass as f64 };
            total += (h_k - members.len() as f64 / self.n as f64).max(0.0);
        }
        Some(total / (self.c - 1) as f64)
    }

    pub fn degree_mass(&self) -> Vec<f64> {
        let two_e = 2.0 * self.num_edges() as f64;
        (0..self.c).map(|k| (0..self.n).filter(|&i| self.y[i] == k).map(|i| self.deg(i)).sum::<usize>() as f64 / two_e).collect()
    }

    pub fn h_adj(&self) -> Option<f64> {
        let h = self.h_edge()?;
        let e: f64 = self.degree_mass().iter().map(|p| p * p).sum();
        (e < 1.0).then(|| (h - e) / (1.0 - e))
    }

    pub fn h_ge(&self) -> Option<f64> {
        let mut sum = 0.0;
        let mut count = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.adj[i][j] {
                    continue;
                }
                count += 1;
                let dot: f64 = self.x[i].iter().zip(&self.x[j]).map(|(a, b)| a * b).sum();
                let ni = self.x[i].iter().map(|a| a * a).sum::<f64>().sqrt();
                let nj = self.x[j].iter().map(|a| a * a).sum::<f64>().sqrt();
                if ni > 0.0 && nj > 0.0 {
                    sum += dot / (ni * nj);
                }
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    /// `S = ÂY(ÂY)^T` with `Â = D̃^{-1}(A + I)`, compared row by row.
    pub fn h_agg(&self) -> f64 {
        let n = self.n;
        let mut z = vec![vec![0.0; self.c]; n];
        for i in 0..n {
            let d = (self.deg(i) + 1) as f64;
            for j in 0..n {
                if i == j || self.adj[i][j] {
                    z[i][self.y[j]] += 1.0 / d;
                }
            }
        }
        let s = |a: usize, b: usize| -> f64 { (0..self.c).map(|k| z[a][k] * z[b][k]).sum() };
        let mut satisfied = 0;
        for v in 0..n {
            let same: Vec<f64> = (0..n).filter(|&u| self.y[u] == self.y[v]).map(|u| s(v, u)).collect();
            let other: Vec<f64> = (0..n).filter(|&u| self.y[u] != self.y[v]).map(|u| s(v, u)).collect();
            if other.is_empty() {
                satisfied += 1;
                continue;
            }
            let ms = same.iter().sum::<f64>() / same.len() as f64;
            let mo = other.iter().sum::<f64>() / other.len() as f64;
            if ms >= mo - 1e-12 * ms.abs().max(mo.abs()) {
                satisfied += 1;
            }
        }
        satisfied as f64 / n as f64
    }

    pub fn li(&self) -> Option<f64> {
        let two_e = 2.0 * self.num_edges() as f64;
        if two_e == 0.0 {
            return None;
        }
        let mut joint = vec![vec![0.0; self.c]; self.c];
        for i in 0..self.n {
            for j in 0..self.n {
                if self.adj[i][j] {
                    joint[self.y[i]][self.y[j]] += 1.0 / two_e;
                }
            }
        }
        let p = self.degree_mass();
        let mut num = 0.0;
        for a in 0..self.c {
            for b in 0..self.c {
                if joint[a][b] > 0.0 {
                    num += joint[a][b] * (joint[a][b] / (p[a] * p[b])).ln();
                }
            }
        }
        let den: f64 = p.iter().filter(|&&q| q > 0.0).map(|q| q * q.ln()).sum();
        (den != 0.0).then(|| -num / den)
    }

    pub fn h_neighbor(&self) -> Option<f64> {
        if self.c < 2 {
            return None;
        }
        let mut raw = 0.0;
        for k in 0..self.c {
            let rows: Vec<Vec<f64>> = (0..self.n)
                .filter(|&i| self.y[i] == k)
                .map(|i| {
                    let mut r = vec![0.0; self.c];
                    let d = self.deg(i);
                    for j in 0..self.n {
                        if self.adj[i][j] {
                            r[self.y[j]] += 1.0 / d as f64;
                        }
                    }
                    r
                })
                .collect();
            let sigma = jacobi_singular_values(&rows, self.c);
            let max = sigma.iter().copied().fold(0.0, f64::max);
            if max == 0.0 {
                return None;
            }
            let kept: Vec<f64> = sigma.into_iter().filter(|&s| s > 1e-12 * max).collect();
            let total: f64 = kept.iter().sum();
            let h: f64 = kept.iter().map(|s| -(s / total) * (s / total).ln()).sum::<f64>() / (self.c as f64).ln();
            raw += rows.len() as f64 / self.n as f64 * h;
        }
        Some(raw)
    }
}

/// One-sided (Hestenes) Jacobi: rotate column pairs until orthogonal; the
/// singular values are the final column norms.
pub fn jacobi_singular_values(rows: &[Vec<f64>], cols: usize) -> Vec<f64> {
    let mut a: Vec<Vec<f64>> = (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a[p].iter().map(|v| v * v).sum();
                let beta: f64 = a[q].iter().map(|v| v * v).sum();
                let gamma: f64 = a[p].iter().zip(&a[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-300 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..a[p].len() {
                    let (x, y) = (a[p][i], a[q][i]);
                    a[p][i] = cs * x - sn * y;
                    a[q][i] = sn * x + cs * y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    a.iter().map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
}

pub fn named_graphs() -> Vec<(&'static str, Dense)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut feats = |n: usize| -> Vec<Vec<f64>> { (0..n).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect() };
    let mut out = Vec::new();
    let mut add = |name, n: usize, edges: &[(usize, usize)], y: &[usize], x| out.push((name, Dense::new(n, edges, y, x)));

    add("triangle", 3, &[(0, 1), (1, 2), (0, 2)], &[0, 0, 1], feats(3));
    add("k22", 4, &[(0, 2), (0, 3), (1, 2), (1, 3)], &[0, 0, 1, 1], feats(4));
    let k33: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
    add("k33", 6, &k33, &[0, 0, 0, 1, 1, 1], feats(6));
    add("path5", 5, &[(0, 1), (1, 2), (2, 3), (3, 4)], &[0, 1, 0, 1, 1], feats(5));
    add("star", 5, &[(0, 1), (0, 2), (0, 3), (0, 4)], &[0, 1, 1, 1, 1], feats(5));
    add("two_cliques", 6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], &[0, 0, 0, 1, 1, 1], feats(6));
    add("cycle6", 6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], &[0, 0, 1, 1, 2, 2], feats(6));
    let cube: Vec<(usize, usize)> =
        (0..8usize).flat_map(|a| (0..3).map(move |b| (a, a ^ (1 << b)))).filter(|&(a, b)| a < b).collect();
    add("cube", 8, &cube, &[0, 1, 1, 2, 1, 2, 2, 0], feats(8));
    let wheel: Vec<(usize, usize)> = (1..6).flat_map(|i| [(0, i), (i, i % 5 + 1)]).collect();
    add("wheel6", 6, &wheel, &[0, 1, 1, 0, 1, 0], feats(6));
    let mut barbell: Vec<(usize, usize)> = Vec::new();
    for base in [0, 4] {
        for a in 0..4 {
            for b in a + 1..4 {
                barbell.push((base + a, base + b));
            }
        }
    }
    barbell.push((3, 4));
    add("barbell", 8, &barbell, &[0, 0, 0, 1, 1, 2, 2, 2], feats(8));
    add("isolated_node", 5, &[(0, 1), (1, 2), (2, 3)], &[0, 1, 1, 0, 1], feats(5));
    let k5: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    add("k5", 5, &k5, &[0, 1, 2, 0, 1], feats(5));
    let mut zero = feats(4);
    zero[1] = vec![0.0; 3];
    add("zero_feature", 4, &[(0, 1), (1, 2), (2, 3), (0, 3)], &[0, 0, 1, 1], zero);
    out
}

pub fn random_dense(rng: &mut ChaCha8Rng, max_n: usize) -> Dense {
    let n = rng.random_range(3..=max_n);
    let c = rng.random_range(2..=3.min(n));
    let mut y: Vec<usize> = (0..n).map(|i| if i < c { i } else { rng.random_range(0..c) }).collect();
    y.shuffle(rng);
    let p = rng.random_range(0.15..0.9);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.random_bool(p)).collect();
    let x = (0..n).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    Dense::new(n, &edges, &y, x)
}

pub fn close(name: &str, got: Option<f64>, want: Option<f64>) -> Result<(), String> {
    match (got, want) {
        (Some(a), Some(b)) if (a - b).abs() <= 1e-12 => Ok(()),
        (None, None) => Ok(()),
        _ => Err(format!("{name}: implementation {got:?} vs oracle {want:?}")),
    }
}

pub fn exact(name: &str, got: Option<f64>, want: Option<f64>) -> Result<(), String> {
    if got.map(f64::to_bits) == want.map(f64::to_bits) {
        Ok(())
    } else {
        Err(format!("{name}: implementation {got:?} vs oracle {want:?}"))
    }
}

pub fn check_all(d: &Dense) -> Result<(), String> {
    let g = d.graph();
    exact("edge", edge_homophily(&g).ok(), d.h_edge())?;
    close("node", node_homophily(&g).ok(), d.h_node())?;
    close("class", class_homophily(&g).ok(), d.h_class())?;
    close("adjusted", adjusted_homophily(&g).ok(), d.h_adj())?;
    close("generalized_edge", generalized_edge_homophily(&g).ok(), d.h_ge())?;
    exact("aggregation", aggregation_homophily(&g, AffinityKind::RenormRw).ok(), Some(d.h_agg()))?;
    close("label_informativeness", label_informativeness(&g).ok(), d.li())?;
    close("neighbor", neighbor_identifiability(&g).ok().map(|r| r.0), d.h_neighbor())?;
    Ok(())
}
