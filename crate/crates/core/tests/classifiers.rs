//! Training machinery: exact gradients, optimizer behavior, determinism and
//! sanity fixtures.

mod common;

use common::gradcheck::{random_graph, worst_relative_error};
use homophily_bench::classifiers::{
    grid_search, train_model, train_on, Model, ModelData, ModelKind, Split, TrainConfig, TrainGrid,
};
use homophily_bench::generators::{generate_regular, FeatureSource, RegularGraphSpec};
use homophily_bench::graph::AffinityKind;
use homophily_bench::seed;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Two well-separated 2-D Gaussian classes.
fn separable(n: usize, s: u64) -> (DMatrix<f64>, Vec<usize>) {
    let mut rng = seed::rng(s);
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let x = DMatrix::from_fn(n, 2, |i, _| {
        let centre = if labels[i] == 0 { -3.0 } else { 3.0 };
        centre + rng.sample::<f64, _>(StandardNormal)
    });
    (x, labels)
}

#[test]
fn analytic_gradients_match_central_differences() {
    for kind in ModelKind::ALL {
        for s in 0..5 {
            let worst = worst_relative_error(kind, s);
            assert!(worst < 1e-5, "{kind} seed {s}: {worst:.2e}");
        }
    }
}

#[test]
fn sgc1_is_logistic_regression_on_aggregated_features() {
    let g = random_graph(60, 5, 3, 7);
    let split = Split::random(g.labels(), 3, [0.6, 0.2, 0.2], 1).unwrap();
    let ax = g.apply_affinity(AffinityKind::RenormSym, g.features()).unwrap();
    let cfg = TrainConfig { dropout: 0.3, weight_decay: 5e-4, max_epochs: 40, patience: 100, ..TrainConfig::default() };
    let sgc = train_on(&ModelData::new(&g, ModelKind::Sgc1).unwrap(), ModelKind::Sgc1, &cfg, &split).unwrap();
    let mlp = train_on(&ModelData::from_features(ax, g.labels().to_vec(), 3), ModelKind::Mlp1, &cfg, &split).unwrap();
    assert_eq!(sgc.losses.len(), 40);
    assert_eq!(sgc.losses, mlp.losses);
    assert_eq!(sgc, mlp);
}

#[test]
fn loss_decreases_early_without_regularization() {
    let (x, y) = separable(200, 3);
    let split = Split::random(&y, 2, [0.6, 0.2, 0.2], 3).unwrap();
    let data = ModelData::from_features(x, y, 2);
    for kind in [ModelKind::Mlp1, ModelKind::Mlp2] {
        let cfg = TrainConfig { learning_rate: 0.01, max_epochs: 10, patience: 100, ..TrainConfig::default() };
        let out = train_on(&data, kind, &cfg, &split).unwrap();
        assert_eq!(out.losses.len(), 10);
        for w in out.losses.windows(2) {
            assert!(w[1] <= w[0], "{kind}: {:?}", out.losses);
        }
    }
}

#[test]
fn mlp1_separates_gaussian_classes() {
    let (x, y) = separable(200, 11);
    let split = Split::random(&y, 2, [0.6, 0.2, 0.2], 11).unwrap();
    let out = train_on(&ModelData::from_features(x, y, 2), ModelKind::Mlp1, &TrainConfig::default(), &split).unwrap();
    assert!(out.test_accuracy >= 0.95, "{}", out.test_accuracy);
}

#[test]
fn aggregation_denoises_on_a_perfectly_homophilic_graph() {
    let spec = RegularGraphSpec {
        target_edge_homophily: 1.0,
        features: FeatureSource::Gaussian { dim: 16, class_mean_spread: 1.0, stdev: 3.0 },
        seed: 4,
        ..RegularGraphSpec::default()
    };
    let g = generate_regular(&spec).unwrap();
    let split = Split::random(g.labels(), g.num_classes(), [0.6, 0.2, 0.2], 4).unwrap();
    let cfg = TrainConfig { learning_rate: 0.05, ..TrainConfig::default() };
    let sgc = train_model(&g, ModelKind::Sgc1, &cfg, &split).unwrap();
    let mlp = train_model(&g, ModelKind::Mlp1, &cfg, &split).unwrap();
    assert!(sgc.test_accuracy >= mlp.test_accuracy - 0.02, "sgc {} mlp {}", sgc.test_accuracy, mlp.test_accuracy);
}

#[test]
fn zero_learning_rate_keeps_the_initial_model() {
    let g = random_graph(80, 6, 3, 21);
    let split = Split::random(g.labels(), 3, [0.6, 0.2, 0.2], 2).unwrap();
    let cfg = TrainConfig { learning_rate: 0.0, max_epochs: 20, patience: 100, seed: 17, ..TrainConfig::default() };
    let data = ModelData::new(&g, ModelKind::Gcn).unwrap();
    let out = train_on(&data, ModelKind::Gcn, &cfg, &split).unwrap();

    let model = Model::init(ModelKind::Gcn, 6, cfg.hidden_width, 3, &mut seed::rng(cfg.seed));
    let z = model.logits(&data).unwrap();
    let predicted = |i: usize| (0..3).max_by(|&a, &b| z[(i, a)].total_cmp(&z[(i, b)]).then(b.cmp(&a))).unwrap();
    let untrained =
        split.test.iter().filter(|&&i| predicted(i) == g.labels()[i]).count() as f64 / split.test.len() as f64;
    assert_eq!(out.test_accuracy, untrained);
    assert_eq!(out.best_epoch, 0);
    assert!(out.losses.iter().all(|&l| l == out.losses[0]));
}

#[test]
fn training_is_bit_deterministic() {
    let g = random_graph(120, 8, 4, 5);
    let split = Split::random(g.labels(), 4, [0.6, 0.2, 0.2], 5).unwrap();
    for kind in ModelKind::ALL {
        let cfg = TrainConfig { dropout: 0.5, weight_decay: 5e-4, max_epochs: 60, seed: 9, ..TrainConfig::default() };
        let a = train_model(&g, kind, &cfg, &split).unwrap();
        let b = train_model(&g, kind, &cfg, &split).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.losses.iter().map(|l| l.to_bits()).collect::<Vec<_>>(), b.losses.iter().map(|l| l.to_bits()).collect::<Vec<_>>());
    }
}

#[test]
fn single_config_grid_equals_one_training_run() {
    let g = random_graph(100, 5, 3, 8);
    let split = Split::random(g.labels(), 3, [0.6, 0.2, 0.2], 8).unwrap();
    let cfg = TrainConfig { max_epochs: 50, seed: 31, ..TrainConfig::default() };
    let grid = grid_search(&g, ModelKind::Gcn, &split, &TrainGrid::single(&cfg), 31).unwrap();
    let direct = train_model(&g, ModelKind::Gcn, &cfg, &split).unwrap();
    assert_eq!(grid.best, cfg);
    assert_eq!(grid.outcome, direct);
    assert_eq!(grid.runs.len(), 1);
}
