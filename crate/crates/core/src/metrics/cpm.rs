//! Classifier-based performance metric.
//!
//! Repeatedly samples labeled nodes, splits them into train/test, and scores
//! a training-free classifier on raw features `X` and on aggregated features
//! `H = Â_sym X`. The metric is the p-value of the one-sided test
//! `H1: mean Acc(H) < mean Acc(X)`: values near 1 mean aggregation helps.

use nalgebra::DMatrix;
use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::classifiers::{gnb_fit_predict, kernel_regression_predict, Kernel};
use crate::error::{Error, Result};
use crate::graph::{AffinityKind, Graph};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpmClassifier {
    Gnb,
    KrLinear,
    KrNonlinear,
}

impl CpmClassifier {
    pub const ALL: [CpmClassifier; 3] = [CpmClassifier::Gnb, CpmClassifier::KrLinear, CpmClassifier::KrNonlinear];

    fn predict(self, train_x: &DMatrix<f64>, train_y: &[usize], test_x: &DMatrix<f64>, c: usize) -> Result<Vec<usize>> {
        let kernel = match self {
            CpmClassifier::Gnb => return gnb_fit_predict(train_x, train_y, test_x, c),
            CpmClassifier::KrLinear => Kernel::Linear,
            CpmClassifier::KrNonlinear => Kernel::ReluNngp,
        };
        let onehot = DMatrix::from_fn(train_y.len(), c, |i, j| if train_y[i] == j { 1.0 } else { 0.0 });
        kernel_regression_predict(train_x, &onehot, test_x, kernel, kernel.default_ridge(train_x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignificanceTest {
    /// One-sided Welch two-sample t-test.
    Welch,
    /// One-sided Mann-Whitney U test, normal approximation with tie correction.
    MannWhitney,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CpmOptions {
    pub repetitions: usize,
    pub sample_size: usize,
    pub train_fraction: f64,
    pub test: SignificanceTest,
    pub max_retries: usize,
}

impl Default for CpmOptions {
    fn default() -> Self {
        CpmOptions {
            repetitions: 100,
            sample_size: 500,
            train_fraction: 0.6,
            test: SignificanceTest::Welch,
            max_retries: 10,
        }
    }
}

pub const CPM_MIN_NODES: usize = 50;

fn stratified_sample(
    labels: &[usize],
    num_classes: usize,
    opts: &CpmOptions,
    rng: &mut seed::Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = labels.len();
    let m = opts.sample_size.min(n);
    let mut missing = 0;
    for _ in 0..=opts.max_retries {
        let picked = index::sample(rng, n, m).into_vec();
        let mut by_class = vec![Vec::new(); num_classes];
        for i in picked {
            by_class[labels[i]].push(i);
        }
        let mut train = Vec::new();
        let mut test = Vec::new();
        for members in &mut by_class {
            members.shuffle(rng);
            let k = (opts.train_fraction * members.len() as f64).round() as usize;
            train.extend_from_slice(&members[..k]);
            test.extend_from_slice(&members[k..]);
        }
        match by_class
            .iter()
            .zip(0..)
            .find(|(members, _)| (opts.train_fraction * members.len() as f64).round() < 1.0)
        {
            None => return Ok((train, test)),
            Some((_, c)) => missing = c,
        }
    }
    Err(Error::ClassMissingFromTrainSplit(missing))
}

fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

/// Paired accuracy samples `(acc_x, acc_h)`; both feature sets see the same
/// nodes and split in each repetition.
pub fn cpm_accuracy_samples(
    g: &Graph,
    classifier: CpmClassifier,
    seed: u64,
    opts: &CpmOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let aggregated = g.apply_affinity(AffinityKind::RenormSym, g.features())?;
    cpm_samples_with(g.features(), &aggregated, g.labels(), g.num_classes(), classifier, seed, opts)
}

fn cpm_samples_with(
    x: &DMatrix<f64>,
    h: &DMatrix<f64>,
    labels: &[usize],
    num_classes: usize,
    classifier: CpmClassifier,
    seed: u64,
    opts: &CpmOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if labels.len() < CPM_MIN_NODES {
        return Err(Error::InvalidSpec(format!(
            "CPM needs at least {CPM_MIN_NODES} nodes, graph has {}",
            labels.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let mut acc_x = Vec::with_capacity(opts.repetitions);
    let mut acc_h = Vec::with_capacity(opts.repetitions);
    for _ in 0..opts.repetitions {
        let (train, test) = stratified_sample(labels, num_classes, opts, &mut rng)?;
        let train_y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
        let test_y: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
        for (features, out) in [(x, &mut acc_x), (h, &mut acc_h)] {
            let pred = classifier.predict(
                &features.select_rows(&train),
                &train_y,
                &features.select_rows(&test),
                num_classes,
            )?;
            out.push(accuracy(&pred, &test_y));
        }
    }
    Ok((acc_x, acc_h))
}

pub fn cpm_pvalue(g: &Graph, classifier: CpmClassifier, seed: u64, opts: &CpmOptions) -> Result<f64> {
    let (acc_x, acc_h) = cpm_accuracy_samples(g, classifier, seed, opts)?;
    Ok(one_sided_pvalue(&acc_h, &acc_x, opts.test))
}

fn mean_var(s: &[f64]) -> (f64, f64) {
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// p-value for `H1: mean(a) < mean(b)`.
pub fn one_sided_pvalue(a: &[f64], b: &[f64], test: SignificanceTest) -> f64 {
    match test {
        SignificanceTest::Welch => welch_less(a, b),
        SignificanceTest::MannWhitney => mann_whitney_less(a, b),
    }
}

fn degenerate(diff: f64) -> f64 {
    if diff < 0.0 {
        0.0
    } else if diff > 0.0 {
        1.0
    } else {
        0.5
    }
}

fn welch_less(a: &[f64], b: &[f64]) -> f64 {
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let sa = va / a.len() as f64;
    let sb = vb / b.len() as f64;
    let se2 = sa + sb;
    if !(se2 > 0.0) {
        return degenerate(ma - mb);
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom").cdf(t)
}

fn mann_whitney_less(a: &[f64], b: &[f64]) -> f64 {
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let mut pooled: Vec<(f64, bool)> = a.iter().map(|&v| (v, true)).chain(b.iter().map(|&v| (v, false))).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += pooled[i..=j].iter().filter(|p| p.1).count() as f64 * avg_rank;
        i = j + 1;
    }
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let mu = n1 * n2 / 2.0;
    let nn = n1 + n2;
    let var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if !(var > 0.0) {
        return degenerate(u - mu);
    }
    let z = (u - mu + 0.5) / var.sqrt();
    Normal::new(0.0, 1.0).unwrap().cdf(z)
}
