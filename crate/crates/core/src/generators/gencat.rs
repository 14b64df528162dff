//! Latent-factor generation conditioned on a base graph.
//!
//! `gencat_fit` summarizes the base graph, `gencat_adjust` shifts same-class
//! preference by `0.1 * beta`, and `gencat_generate` samples a new graph.
//! The edge-sampling law inside `gencat_generate` is a concrete stand-in:
//! node `i` draws a degree `k_i` from the base degree list and initiates
//! `k_i / 2` (stochastically rounded) edges, each towards a node `j` chosen
//! with weight `U'[i, y_j]`. `U'` is calibrated so that its class averages
//! equal the adjusted class preference mean (see `connection_proportions`).

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use rand_distr::{Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenCatParams {
    /// Row `a`: mean over class-`a` nodes of their neighbor-label fractions.
    pub class_preference_mean: DMatrix<f64>,
    /// Elementwise standard deviation of the same per-node fractions.
    pub class_preference_deviation: DMatrix<f64>,
    pub class_size_distribution: Vec<f64>,
    /// `F x C`: per-class feature means, each class column min-max normalized over features.
    pub attr_class_corr: DMatrix<f64>,
    /// Degrees of the base graph, resampled for generated nodes.
    pub degrees: Vec<usize>,
}

impl GenCatParams {
    pub fn num_classes(&self) -> usize {
        self.class_size_distribution.len()
    }

    pub fn mean_self_preference(&self) -> f64 {
        let m = &self.class_preference_mean;
        m.diagonal().sum() / m.nrows() as f64
    }

    /// Admissible `beta`: `floor(10 M_avg) - 9 ..= floor(10 M_avg)`.
    pub fn beta_range(&self) -> (i32, i32) {
        let top = (10.0 * self.mean_self_preference() + 1e-9).floor() as i32;
        (top - 9, top)
    }
}

pub fn gencat_fit(base: &Graph) -> Result<GenCatParams> {
    let c = base.num_classes();
    let n = base.num_nodes();
    let y = base.labels();
    let sizes = base.class_sizes();
    if let Some(k) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyClass(k));
    }

    let mut sum = DMatrix::<f64>::zeros(c, c);
    let mut sum_sq = DMatrix::<f64>::zeros(c, c);
    let mut counted = vec![0usize; c];
    let mut skipped = 0usize;
    let mut frac = vec![0.0; c];
    for v in 0..n {
        let d = base.degree(v);
        if d == 0 {
            skipped += 1;
            continue;
        }
        frac.iter_mut().for_each(|f| *f = 0.0);
        for &u in base.neighbors(v) {
            frac[y[u]] += 1.0 / d as f64;
        }
        for (b, &f) in frac.iter().enumerate() {
            sum[(y[v], b)] += f;
            sum_sq[(y[v], b)] += f * f;
        }
        counted[y[v]] += 1;
    }
    if skipped > 0 {
        log::warn!("gencat_fit skipped {skipped} zero-degree nodes");
    }
    if let Some(k) = counted.iter().position(|&k| k == 0) {
        return Err(Error::EmptyClass(k));
    }
    let mean = DMatrix::from_fn(c, c, |a, b| sum[(a, b)] / counted[a] as f64);
    let dev = DMatrix::from_fn(c, c, |a, b| {
        let mu = mean[(a, b)];
        (sum_sq[(a, b)] / counted[a] as f64 - mu * mu).max(0.0).sqrt()
    });

    let x = base.features();
    let f = x.ncols();
    let mut class_means = DMatrix::<f64>::zeros(f, c);
    for v in 0..n {
        for j in 0..f {
            class_means[(j, y[v])] += x[(v, j)] / sizes[y[v]] as f64;
        }
    }
    // each class column min-max normalized over features
    let attr = DMatrix::from_fn(f, c, |j, k| {
        let col = class_means.column(k);
        let (lo, hi) = (col.min(), col.max());
        if hi > lo {
            (class_means[(j, k)] - lo) / (hi - lo)
        } else {
            0.5
        }
    });

    Ok(GenCatParams {
        class_preference_mean: mean,
        class_preference_deviation: dev,
        class_size_distribution: sizes.iter().map(|&s| s as f64 / n as f64).collect(),
        attr_class_corr: attr,
        degrees: base.degrees(),
    })
}

/// Lowers same-class preference by `0.1 beta`, spreads it evenly over the
/// other classes, clamps at 0 and renormalizes rows.
pub fn gencat_adjust(params: &GenCatParams, beta: i32) -> Result<GenCatParams> {
    let (min, max) = params.beta_range();
    if beta < min || beta > max {
        return Err(Error::BetaOutOfRange { beta, min, max });
    }
    let c = params.num_classes();
    let shift = 0.1 * beta as f64;
    let off = if c > 1 { shift / (c - 1) as f64 } else { 0.0 };
    let mut m = params.class_preference_mean.clone();
    for a in 0..c {
        for b in 0..c {
            let v = if a == b { m[(a, b)] - shift } else { m[(a, b)] + off };
            m[(a, b)] = v.max(0.0);
        }
        let total: f64 = m.row(a).sum();
        if total > 0.0 {
            m.row_mut(a).scale_mut(1.0 / total);
        } else {
            m.row_mut(a).fill(1.0 / c as f64);
        }
    }
    Ok(GenCatParams { class_preference_mean: m, ..params.clone() })
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// `U' = U_λ · M̃` with `U_λ = (1-λ) onehot + λ U` and `M̃ = Ū_λ⁻¹ M`, where
/// row `a` of `Ū_λ` is the mean of `U_λ` over class `a`.
///
/// Projection onto the simplex pulls `E[U]` off the one-hot corners; `M̃`
/// undoes that so each class still averages to its row of `M`. Rows of `M̃`
/// sum to 1 because rows of `Ū_λ` and `M` do. `λ` is the largest value in
/// `[0, 1]` (by bisection) keeping every entry of `U'` nonnegative, so the
/// noise is only shrunk when `M` sits too close to a simplex face.
fn connection_proportions(u: &DMatrix<f64>, labels: &[usize], members: &[Vec<usize>], m: &DMatrix<f64>) -> DMatrix<f64> {
    let c = m.nrows();
    let n = labels.len();
    let onehot = DMatrix::from_fn(n, c, |i, k| if labels[i] == k { 1.0 } else { 0.0 });
    let mut u_bar = DMatrix::<f64>::zeros(c, c);
    for (i, &a) in labels.iter().enumerate() {
        for k in 0..c {
            u_bar[(a, k)] += u[(i, k)] / members[a].len() as f64;
        }
    }
    let identity = DMatrix::<f64>::identity(c, c);
    let attempt = |lambda: f64| -> Option<DMatrix<f64>> {
        let bar = &identity * (1.0 - lambda) + &u_bar * lambda;
        let mixing = bar.lu().solve(m)?;
        let out = (&onehot * (1.0 - lambda) + u * lambda) * mixing;
        out.iter().all(|v| v.is_finite() && *v >= -1e-12).then_some(out)
    };
    if let Some(out) = attempt(1.0) {
        return out.map(|v| v.max(0.0));
    }
    // lambda = 0 gives U' = onehot · M, always valid
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = &onehot * m;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        match attempt(mid) {
            Some(out) => {
                lo = mid;
                best = out;
            }
            None => hi = mid,
        }
    }
    best.map(|v| v.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenCatOptions {
    pub num_nodes: usize,
    /// Multiplies the class preference deviation used to perturb `U`.
    pub deviation_scale: f64,
    pub feature_stdev: f64,
}

impl Default for GenCatOptions {
    fn default() -> Self {
        GenCatOptions { num_nodes: 2000, deviation_scale: 1.0, feature_stdev: 0.1 }
    }
}

pub fn gencat_generate(params: &GenCatParams, opts: &GenCatOptions, seed: u64) -> Result<Graph> {
    let c = params.num_classes();
    let n = opts.num_nodes;
    if n < c.max(2) {
        return Err(Error::InvalidSpec(format!("need at least {} nodes, got {n}", c.max(2))));
    }
    if params.degrees.is_empty() {
        return Err(Error::InvalidSpec("base degree list is empty".into()));
    }
    let mut rng = seed::rng(seed);

    let class_dist = WeightedIndex::new(&params.class_size_distribution)
        .map_err(|e| Error::InvalidSpec(format!("class size distribution: {e}")))?;
    let mut labels = Vec::new();
    for attempt in 0.. {
        labels = (0..n).map(|_| class_dist.sample(&mut rng)).collect();
        let mut present = vec![false; c];
        labels.iter().for_each(|&k| present[k] = true);
        match present.iter().position(|p| !p) {
            None => break,
            Some(k) if attempt >= 9 => return Err(Error::ClassMissing(k)),
            Some(_) => {}
        }
    }
    let mut members = vec![Vec::new(); c];
    for (v, &k) in labels.iter().enumerate() {
        members[k].push(v);
    }

    // U = proj(onehot + Dev ⊙ eps)
    let dev = &params.class_preference_deviation;
    let mut u = DMatrix::<f64>::zeros(n, c);
    let mut row = vec![0.0f64; c];
    for i in 0..n {
        for (k, r) in row.iter_mut().enumerate() {
            let eps: f64 = rng.sample(StandardNormal);
            *r = if labels[i] == k { 1.0 } else { 0.0 } + opts.deviation_scale * dev[(labels[i], k)] * eps;
        }
        u.row_mut(i).copy_from_slice(&project_to_simplex(&row));
    }
    let u_prime = connection_proportions(&u, &labels, &members, &params.class_preference_mean);
    let key = |a: usize, b: usize| (a.min(b) * n + a.max(b)) as u64;
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let mut class_weights = vec![0.0; c];
    for i in 0..n {
        let half = params.degrees[rng.random_range(0..params.degrees.len())] as f64 / 2.0;
        let mut count = half.floor() as usize;
        if rng.random::<f64>() < half.fract() {
            count += 1;
        }
        for (k, w) in class_weights.iter_mut().enumerate() {
            let available = members[k].len() - usize::from(labels[i] == k);
            *w = u_prime[(i, k)] * available as f64;
        }
        let Ok(pick_class) = WeightedIndex::new(&class_weights) else {
            continue;
        };
        for _ in 0..count {
            // bounded redraws keep dense corners from stalling
            for _ in 0..32 {
                let k = pick_class.sample(&mut rng);
                let j = members[k][rng.random_range(0..members[k].len())];
                if j != i && seen.insert(key(i, j)) {
                    edges.push((i, j));
                    break;
                }
            }
        }
    }

    let noise = Normal::new(0.0, opts.feature_stdev)
        .map_err(|e| Error::InvalidSpec(format!("feature stdev {}: {e}", opts.feature_stdev)))?;
    let attr = &params.attr_class_corr;
    let features = DMatrix::from_fn(n, attr.nrows(), |i, f| attr[(f, labels[i])] + noise.sample(&mut rng));
    Graph::build_with_classes(&edges, labels, features, c)
}
