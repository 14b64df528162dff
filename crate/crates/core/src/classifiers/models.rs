//! The four baseline node classifiers with closed-form gradients.
//!
//! ```text
//! MLP-1:  softmax(X W0 + b0)
//! SGC-1:  softmax(Â X W0 + b0)
//! MLP-2:  softmax(relu(X W0 + b0) W1 + b1)
//! GCN:    softmax(Â relu(Â X W0 + b0) W1 + b1)
//! ```
//!
//! `Â` is the renormalized symmetric affinity. Training is full batch with
//! Adam, L2 weight decay folded into the gradient, inverted dropout on the
//! input features and hidden activations, and early stopping on validation
//! accuracy.

use std::borrow::Cow;

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::Split;
use crate::error::{Error, Result};
use crate::graph::{AffinityKind, AffinityOperator, Graph};
use crate::seed;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mlp1,
    Sgc1,
    Mlp2,
    Gcn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Gcn, ModelKind::Sgc1, ModelKind::Mlp2, ModelKind::Mlp1];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlp1 => "mlp1",
            ModelKind::Sgc1 => "sgc1",
            ModelKind::Mlp2 => "mlp2",
            ModelKind::Gcn => "gcn",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn has_hidden_layer(self) -> bool {
        matches!(self, ModelKind::Mlp2 | ModelKind::Gcn)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub hidden_width: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            weight_decay: 0.0,
            dropout: 0.0,
            hidden_width: 64,
            max_epochs: 500,
            patience: 50,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate >= 0.0
            && self.weight_decay >= 0.0
            && (0.0..1.0).contains(&self.dropout)
            && self.hidden_width >= 1
            && self.max_epochs >= 1
            && self.patience >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("bad training config {self:?}")))
        }
    }
}

/// Model inputs precomputed once per graph.
#[derive(Debug, Clone)]
pub struct ModelData {
    input: DMatrix<f64>,
    aggregated: Option<DMatrix<f64>>,
    operator: Option<AffinityOperator>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl ModelData {
    pub fn new(g: &Graph, kind: ModelKind) -> Result<Self> {
        let x = g.features().clone();
        let labels = g.labels().to_vec();
        let num_classes = g.num_classes();
        Ok(match kind {
            ModelKind::Mlp1 | ModelKind::Mlp2 => ModelData::from_features(x, labels, num_classes),
            ModelKind::Sgc1 => {
                let ax = g.apply_affinity(AffinityKind::RenormSym, &x)?;
                ModelData::from_features(ax, labels, num_classes)
            }
            ModelKind::Gcn => {
                let op = g.affinity(AffinityKind::RenormSym)?;
                let ax = op.apply(&x)?;
                ModelData {
                    input: x,
                    aggregated: Some(ax),
                    operator: Some(op),
                    labels,
                    num_classes,
                }
            }
        })
    }

    /// Graph-free data, as consumed by the MLPs.
    pub fn from_features(x: DMatrix<f64>, labels: Vec<usize>, num_classes: usize) -> Self {
        ModelData {
            input: x,
            aggregated: None,
            operator: None,
            labels,
            num_classes,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    fn check(&self, kind: ModelKind) -> Result<()> {
        if kind == ModelKind::Gcn && self.operator.is_none() {
            return Err(Error::InvalidSpec("GCN needs graph-backed model data".into()));
        }
        Ok(())
    }
}

/// Scaled keep-masks (entries 0 or 1/(1-p)); `None` means no dropout.
#[derive(Debug, Clone, Default)]
pub struct DropoutMasks {
    pub input: Option<DMatrix<f64>>,
    pub hidden: Option<DMatrix<f64>>,
}

impl DropoutMasks {
    fn sample(rng: &mut seed::Rng, p: f64, n: usize, f: usize, h: Option<usize>) -> Self {
        if p == 0.0 {
            return DropoutMasks::default();
        }
        let keep = 1.0 / (1.0 - p);
        let mut draw = |cols: usize| {
            DMatrix::from_fn(n, cols, |_, _| if rng.random::<f64>() < p { 0.0 } else { keep })
        };
        let input = Some(draw(f));
        let hidden = h.map(draw);
        DropoutMasks { input, hidden }
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    kind: ModelKind,
    params: Vec<DMatrix<f64>>,
}

fn uniform_init(rng: &mut seed::Rng, fan_in: usize, fan_out: usize) -> DMatrix<f64> {
    let bound = 1.0 / (fan_in as f64).sqrt();
    DMatrix::from_fn(fan_in, fan_out, |_, _| rng.random_range(-bound..bound))
}

fn add_bias(m: &mut DMatrix<f64>, b: &DMatrix<f64>) {
    for j in 0..m.ncols() {
        let bj = b[(0, j)];
        m.column_mut(j).iter_mut().for_each(|v| *v += bj);
    }
}

fn col_sums(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(1, m.ncols(), |_, j| m.column(j).sum())
}

fn masked<'a>(m: &'a DMatrix<f64>, mask: Option<&DMatrix<f64>>) -> Cow<'a, DMatrix<f64>> {
    match mask {
        Some(mask) => Cow::Owned(m.component_mul(mask)),
        None => Cow::Borrowed(m),
    }
}

/// Mean softmax cross-entropy over `rows` and its gradient w.r.t. the logits.
fn cross_entropy(z: &DMatrix<f64>, rows: &[usize], labels: &[usize]) -> (f64, DMatrix<f64>) {
    let mut grad = DMatrix::zeros(z.nrows(), z.ncols());
    let scale = 1.0 / rows.len() as f64;
    let mut loss = 0.0;
    for &i in rows {
        let row = z.row(i);
        let max = row.max();
        let sum: f64 = row.iter().map(|v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        loss += lse - z[(i, labels[i])];
        for c in 0..z.ncols() {
            grad[(i, c)] = (z[(i, c)] - lse).exp() * scale;
        }
        grad[(i, labels[i])] -= scale;
    }
    (loss * scale, grad)
}

impl Model {
    pub fn init(kind: ModelKind, in_dim: usize, hidden: usize, num_classes: usize, rng: &mut seed::Rng) -> Self {
        let params = if kind.has_hidden_layer() {
            vec![
                uniform_init(rng, in_dim, hidden),
                DMatrix::zeros(1, hidden),
                uniform_init(rng, hidden, num_classes),
                DMatrix::zeros(1, num_classes),
            ]
        } else {
            vec![uniform_init(rng, in_dim, num_classes), DMatrix::zeros(1, num_classes)]
        };
        Model { kind, params }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> &[DMatrix<f64>] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [DMatrix<f64>] {
        &mut self.params
    }

    /// Pre-softmax outputs for every node, without dropout.
    pub fn logits(&self, data: &ModelData) -> Result<DMatrix<f64>> {
        data.check(self.kind)?;
        let p = &self.params;
        Ok(match self.kind {
            ModelKind::Mlp1 | ModelKind::Sgc1 => {
                let mut z = &data.input * &p[0];
                add_bias(&mut z, &p[1]);
                z
            }
            ModelKind::Mlp2 | ModelKind::Gcn => {
                let first = data.aggregated.as_ref().unwrap_or(&data.input);
                let mut h = first * &p[0];
                add_bias(&mut h, &p[1]);
                h.apply(|v| *v = v.max(0.0));
                let q = h * &p[2];
                let mut z = match &data.operator {
                    Some(op) if self.kind == ModelKind::Gcn => op.apply(&q)?,
                    _ => q,
                };
                add_bias(&mut z, &p[3]);
                z
            }
        })
    }

    /// Training loss (mean cross-entropy on `train` plus `wd/2 * |params|^2`)
    /// and its exact gradient.
    pub fn loss_and_grad(
        &self,
        data: &ModelData,
        train: &[usize],
        weight_decay: f64,
        masks: &DropoutMasks,
    ) -> Result<(f64, Vec<DMatrix<f64>>)> {
        data.check(self.kind)?;
        let p = &self.params;
        let xd = masked(&data.input, masks.input.as_ref());
        let (loss, mut grads) = match self.kind {
            ModelKind::Mlp1 | ModelKind::Sgc1 => {
                let mut z = xd.as_ref() * &p[0];
                add_bias(&mut z, &p[1]);
                let (loss, gz) = cross_entropy(&z, train, &data.labels);
                (loss, vec![xd.tr_mul(&gz), col_sums(&gz)])
            }
            ModelKind::Mlp2 | ModelKind::Gcn => {
                let gcn = self.kind == ModelKind::Gcn;
                let first: Cow<DMatrix<f64>> = match (gcn, &masks.input) {
                    (true, Some(_)) => Cow::Owned(data.operator.as_ref().unwrap().apply(&xd)?),
                    (true, None) => Cow::Borrowed(data.aggregated.as_ref().unwrap()),
                    (false, _) => xd,
                };
                let mut pre = first.as_ref() * &p[0];
                add_bias(&mut pre, &p[1]);
                let active = pre.map(|v| if v > 0.0 { 1.0 } else { 0.0 });
                let hidden = pre.map(|v| v.max(0.0));
                let hd = masked(&hidden, masks.hidden.as_ref());
                let q = hd.as_ref() * &p[2];
                let mut z = if gcn { data.operator.as_ref().unwrap().apply(&q)? } else { q };
                add_bias(&mut z, &p[3]);
                let (loss, gz) = cross_entropy(&z, train, &data.labels);

                // Â is symmetric, so its transpose-apply is a plain apply
                let gq = if gcn { data.operator.as_ref().unwrap().apply(&gz)? } else { gz.clone() };
                let g_w1 = hd.tr_mul(&gq);
                let mut g_pre = gq * p[2].transpose();
                if let Some(mask) = &masks.hidden {
                    g_pre.component_mul_assign(mask);
                }
                g_pre.component_mul_assign(&active);
                let g_w0 = first.tr_mul(&g_pre);
                (loss, vec![g_w0, col_sums(&g_pre), g_w1, col_sums(&gz)])
            }
        };
        let mut total = loss;
        if weight_decay > 0.0 {
            for (g, w) in grads.iter_mut().zip(p) {
                total += 0.5 * weight_decay * w.norm_squared();
                *g += w * weight_decay;
            }
        }
        Ok((total, grads))
    }
}

struct Adam {
    lr: f64,
    t: i32,
    m: Vec<DMatrix<f64>>,
    v: Vec<DMatrix<f64>>,
}

impl Adam {
    fn new(lr: f64, params: &[DMatrix<f64>]) -> Self {
        let zeros: Vec<_> = params.iter().map(|p| DMatrix::zeros(p.nrows(), p.ncols())).collect();
        Adam {
            lr,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    fn step(&mut self, params: &mut [DMatrix<f64>], grads: &[DMatrix<f64>]) {
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t);
        for ((p, g), (m, v)) in params.iter_mut().zip(grads).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            for (((pi, &gi), mi), vi) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
                *mi = ADAM_BETA1 * *mi + (1.0 - ADAM_BETA1) * gi;
                *vi = ADAM_BETA2 * *vi + (1.0 - ADAM_BETA2) * gi * gi;
                *pi -= self.lr * (*mi / c1) / ((*vi / c2).sqrt() + ADAM_EPS);
            }
        }
    }
}

fn accuracy(z: &DMatrix<f64>, rows: &[usize], labels: &[usize]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let correct = rows
        .iter()
        .filter(|&&i| {
            let row: Vec<f64> = z.row(i).iter().copied().collect();
            super::gnb::argmax(&row) == labels[i]
        })
        .count();
    correct as f64 / rows.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub test_accuracy: f64,
    pub val_accuracy: f64,
    pub best_epoch: usize,
    pub epochs_run: usize,
    /// Training loss per epoch, before each update.
    #[serde(skip)]
    pub losses: Vec<f64>,
}

pub fn train_model(g: &Graph, kind: ModelKind, cfg: &TrainConfig, split: &Split) -> Result<TrainOutcome> {
    let data = ModelData::new(g, kind)?;
    train_on(&data, kind, cfg, split)
}

/// Trains a freshly initialized model and reports test accuracy at the
/// epoch of best validation accuracy.
pub fn train_on(data: &ModelData, kind: ModelKind, cfg: &TrainConfig, split: &Split) -> Result<TrainOutcome> {
    cfg.validate()?;
    if split.train.is_empty() {
        return Err(Error::InvalidSpec("empty training split".into()));
    }
    let mut rng = seed::rng(cfg.seed);
    let f = data.input.ncols();
    let mut model = Model::init(kind, f, cfg.hidden_width, data.num_classes, &mut rng);
    let mut adam = Adam::new(cfg.learning_rate, model.params());
    let hidden_cols = kind.has_hidden_layer().then_some(cfg.hidden_width);

    let mut best_val = f64::NEG_INFINITY;
    let mut best_test = 0.0;
    let mut best_epoch = 0;
    let mut losses = Vec::new();
    let mut epochs_run = 0;
    for epoch in 0..cfg.max_epochs {
        epochs_run = epoch + 1;
        let masks = DropoutMasks::sample(&mut rng, cfg.dropout, data.num_nodes(), f, hidden_cols);
        let (loss, grads) = model.loss_and_grad(data, &split.train, cfg.weight_decay, &masks)?;
        if !loss.is_finite() {
            return Err(Error::NonfiniteLoss { epoch, loss });
        }
        losses.push(loss);
        adam.step(model.params_mut(), &grads);

        let z = model.logits(data)?;
        let val = accuracy(&z, &split.val, &data.labels);
        if val > best_val {
            best_val = val;
            best_test = accuracy(&z, &split.test, &data.labels);
            best_epoch = epoch;
        } else if epoch - best_epoch >= cfg.patience {
            break;
        }
    }
    Ok(TrainOutcome {
        test_accuracy: best_test,
        val_accuracy: best_val,
        best_epoch,
        epochs_run,
        losses,
    })
}

/// Cartesian hyperparameter lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainGrid {
    pub learning_rates: Vec<f64>,
    pub weight_decays: Vec<f64>,
    pub dropouts: Vec<f64>,
    pub hidden_width: usize,
    pub max_epochs: usize,
    pub patience: usize,
}

impl TrainGrid {
    /// The complete 3 x 10 x 5 lattice.
    pub fn full() -> Self {
        TrainGrid {
            learning_rates: vec![0.01, 0.05, 0.1],
            weight_decays: vec![0.0, 5e-7, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2],
            dropouts: vec![0.0, 0.1, 0.3, 0.5, 0.7],
            hidden_width: 64,
            max_epochs: 500,
            patience: 50,
        }
    }

    /// Desk-scale lattice: one learning rate, three weight decays, two dropouts.
    pub fn reduced() -> Self {
        TrainGrid {
            learning_rates: vec![0.05],
            weight_decays: vec![0.0, 5e-5, 5e-4],
            dropouts: vec![0.0, 0.5],
            ..TrainGrid::full()
        }
    }

    pub fn single(cfg: &TrainConfig) -> Self {
        TrainGrid {
            learning_rates: vec![cfg.learning_rate],
            weight_decays: vec![cfg.weight_decay],
            dropouts: vec![cfg.dropout],
            hidden_width: cfg.hidden_width,
            max_epochs: cfg.max_epochs,
            patience: cfg.patience,
        }
    }

    pub fn configs(&self, seed: u64) -> Vec<TrainConfig> {
        let mut out = Vec::new();
        for &learning_rate in &self.learning_rates {
            for &weight_decay in &self.weight_decays {
                for &dropout in &self.dropouts {
                    out.push(TrainConfig {
                        learning_rate,
                        weight_decay,
                        dropout,
                        hidden_width: self.hidden_width,
                        max_epochs: self.max_epochs,
                        patience: self.patience,
                        seed,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub best: TrainConfig,
    pub outcome: TrainOutcome,
    /// Every evaluated configuration, in lattice order.
    pub runs: Vec<(TrainConfig, TrainOutcome)>,
}

/// `true` when `a` should be preferred over `b` at equal validation accuracy.
fn tie_preferred(a: &TrainConfig, b: &TrainConfig) -> bool {
    (a.weight_decay, a.learning_rate, a.dropout) < (b.weight_decay, b.learning_rate, b.dropout)
}

pub fn grid_search(g: &Graph, kind: ModelKind, split: &Split, grid: &TrainGrid, seed: u64) -> Result<GridResult> {
    let data = ModelData::new(g, kind)?;
    grid_search_on(&data, kind, split, grid, seed)
}

/// Best-validation configuration; ties go to lower weight decay, then lower
/// learning rate, then lower dropout.
pub fn grid_search_on(
    data: &ModelData,
    kind: ModelKind,
    split: &Split,
    grid: &TrainGrid,
    seed: u64,
) -> Result<GridResult> {
    let configs = grid.configs(seed);
    if configs.is_empty() {
        return Err(Error::InvalidSpec("empty hyperparameter grid".into()));
    }
    let runs = configs
        .into_par_iter()
        .map(|cfg| train_on(data, kind, &cfg, split).map(|o| (cfg, o)))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, (cfg, out)) in runs.iter().enumerate().skip(1) {
        let (best_cfg, best_out) = &runs[best];
        if out.val_accuracy > best_out.val_accuracy
            || (out.val_accuracy == best_out.val_accuracy && tie_preferred(cfg, best_cfg))
        {
            best = i;
        }
    }
    Ok(GridResult {
        best: runs[best].0.clone(),
        outcome: runs[best].1.clone(),
        runs,
    })
}
