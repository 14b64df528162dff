//! Central-difference check of the analytic training gradients.

use homophily_bench::classifiers::{DropoutMasks, Model, ModelData, ModelKind};
use homophily_bench::graph::Graph;
use homophily_bench::seed;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Random `n`-node graph with every class present and no isolated nodes.
pub fn random_graph(n: usize, f: usize, c: usize, s: u64) -> Graph {
    let mut rng = seed::rng(s);
    let labels: Vec<usize> = (0..n).map(|i| if i < c { i } else { rng.random_range(0..c) }).collect();
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, rng.random_range(0..i))).collect();
    for _ in 0..n {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            edges.push((a, b));
        }
    }
    let x = DMatrix::from_fn(n, f, |_, _| rng.sample(StandardNormal));
    Graph::build_with_classes(&edges, labels, x, c).unwrap()
}

fn masks(rng: &mut seed::Rng, n: usize, f: usize, hidden: Option<usize>) -> DropoutMasks {
    let mut draw = |cols: usize| DMatrix::from_fn(n, cols, |_, _| if rng.random::<f64>() < 0.3 { 0.0 } else { 1.0 / 0.7 });
    let input = Some(draw(f));
    DropoutMasks { input, hidden: hidden.map(draw) }
}

/// Largest relative error between analytic and central-difference
/// gradients over every parameter of `kind`, on an N=30, F=7, C=3 instance
/// with dropout masks, weight decay and nonzero biases.
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-3)`.
pub fn worst_relative_error(kind: ModelKind, s: u64) -> f64 {
    let (n, f, c, hidden) = (30, 7, 3, 5);
    let g = random_graph(n, f, c, s);
    let train: Vec<usize> = (0..n).filter(|i| i % 3 != 0).collect();
    let data = ModelData::new(&g, kind).unwrap();
    let mut rng = seed::rng(100 + s);
    let mut model = Model::init(kind, f, hidden, c, &mut rng);
    let m = masks(&mut rng, n, f, kind.has_hidden_layer().then_some(hidden));
    for p in model.params_mut() {
        if p.nrows() == 1 {
            p.iter_mut().for_each(|v| *v = rng.random_range(-0.5..0.5));
        }
    }
    let wd = 1e-2;
    let (_, grads) = model.loss_and_grad(&data, &train, wd, &m).unwrap();
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..model.params().len() {
        for idx in 0..model.params()[k].len() {
            let orig = model.params()[k][idx];
            model.params_mut()[k][idx] = orig + eps;
            let (up, _) = model.loss_and_grad(&data, &train, wd, &m).unwrap();
            model.params_mut()[k][idx] = orig - eps;
            let (down, _) = model.loss_and_grad(&data, &train, wd, &m).unwrap();
            model.params_mut()[k][idx] = orig;
            let numeric = (up - down) / (2.0 * eps);
            let analytic = grads[k][idx];
            worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3));
        }
    }
    worst
}
