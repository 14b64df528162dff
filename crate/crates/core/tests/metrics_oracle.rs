//! Metric implementations against dense brute-force recomputation.

mod common;

use std::time::Instant;

use common::dense::{check_all, close, jacobi_singular_values, named_graphs, random_dense, Dense};
use homophily_bench::graph::{AffinityKind, Graph};
use homophily_bench::metrics::{
    adjusted_homophily, aggregation_homophily, class_homophily, edge_homophily, generalized_edge_homophily,
    label_informativeness, neighbor_identifiability, node_homophily,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn hand_enumerable_graphs_match_brute_force() {
    let start = Instant::now();
    let graphs = named_graphs();
    assert!(graphs.len() >= 10);
    for (name, d) in &graphs {
        assert!(d.n <= 8);
        check_all(d).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    // the comparisons above are not vacuous
    let defined = |f: &dyn Fn(&Dense) -> Option<f64>| graphs.iter().filter(|(_, d)| f(d).is_some()).count();
    assert_eq!(defined(&|d| d.h_edge()), graphs.len());
    assert!(defined(&|d| d.h_adj()) >= 10);
    assert!(defined(&|d| d.li()) >= 10);
    assert!(defined(&|d| d.h_neighbor()) >= 10);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..300 {
        let d = random_dense(&mut rng, 8);
        check_all(&d).unwrap_or_else(|e| panic!("random graph {i}: {e}"));
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn complete_bipartite_k33_aggregation() {
    // every node sees (1/4, 3/4) or (3/4, 1/4): same-side similarity 10/16 beats 6/16
    let (_, d) = named_graphs().into_iter().find(|(n, _)| *n == "k33").unwrap();
    assert_eq!(d.h_agg(), 1.0);
    assert_eq!(aggregation_homophily(&d.graph(), AffinityKind::RenormRw).unwrap(), 1.0);
    assert_eq!(edge_homophily(&d.graph()).unwrap(), 0.0);
}

#[test]
fn jacobi_oracle_recovers_known_spectrum() {
    // columns scaled copies of orthonormal vectors: singular values 3, 2, 0
    let rows = vec![vec![3.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]];
    let mut s = jacobi_singular_values(&rows, 3);
    s.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(s, vec![3.0, 2.0, 0.0]);
    let rows = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
    let s = jacobi_singular_values(&rows, 2);
    assert!(s.iter().all(|v| (v - 2f64.sqrt()).abs() < 1e-15));
}

#[test]
fn six_node_neighbor_identifiability_matches_svd_oracle() {
    let d = Dense::new(
        6,
        &[(0, 1), (0, 3), (1, 4), (2, 5), (2, 3), (1, 2), (4, 5)],
        &[0, 0, 0, 1, 1, 1],
        vec![vec![1.0]; 6],
    );
    let (raw, comp) = neighbor_identifiability(&d.graph()).unwrap();
    let want = d.h_neighbor().unwrap();
    assert!((raw - want).abs() < 1e-10, "{raw} vs {want}");
    assert!((comp - (1.0 - want)).abs() < 1e-10);
}

#[test]
fn edge_and_node_homophily_agree_on_regular_fixture() {
    // 12-cycle with labels in runs of 3: every node has the same degree but
    // fractions differ; runs of 2 on a cycle give every node fraction 1/2
    let n = 12;
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let y: Vec<usize> = (0..n).map(|i| (i / 2) % 3).collect();
    let g = Dense::new(n, &edges, &y, vec![vec![1.0]; n]).graph();
    assert_eq!(edge_homophily(&g).unwrap(), 0.5);
    assert_eq!(node_homophily(&g).unwrap(), 0.5);
}

fn er_shuffled(seed: u64) -> Graph {
    let n = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.01) {
                edges.push((i, j));
            }
        }
    }
    let mut y: Vec<usize> = (0..n).map(|i| i % 4).collect();
    y.shuffle(&mut rng);
    Graph::build(&edges, y, DMatrix::zeros(n, 1)).unwrap()
}

#[test]
fn label_shuffled_erdos_renyi_is_uninformative() {
    let mut adj_sum = 0.0;
    let mut li_sum = 0.0;
    for seed in 0..20 {
        let g = er_shuffled(seed);
        let adj = adjusted_homophily(&g).unwrap();
        let li = label_informativeness(&g).unwrap();
        assert!(adj.abs() < 0.02, "seed {seed}: adjusted {adj}");
        assert!(li.abs() < 0.03, "seed {seed}: LI {li}");
        adj_sum += adj;
        li_sum += li;
    }
    assert!((adj_sum / 20.0).abs() < 0.02);
    assert!((li_sum / 20.0).abs() < 0.03);
}

fn permuted(d: &Dense, node_perm: &[usize], class_perm: &[usize]) -> Dense {
    let n = d.n;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if d.adj[i][j] {
                edges.push((node_perm[i], node_perm[j]));
            }
        }
    }
    let mut y = vec![0; n];
    let mut x = vec![Vec::new(); n];
    for i in 0..n {
        y[node_perm[i]] = class_perm[d.y[i]];
        x[node_perm[i]] = d.x[i].clone();
    }
    Dense::new(n, &edges, &y, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_changes_no_metric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_dense(&mut rng, 8);
        let mut node_perm: Vec<usize> = (0..d.n).collect();
        node_perm.shuffle(&mut rng);
        let mut class_perm: Vec<usize> = (0..d.c).collect();
        class_perm.shuffle(&mut rng);
        let e = permuted(&d, &node_perm, &class_perm);
        let (a, b) = (d.graph(), e.graph());
        let pairs = [
            (edge_homophily(&a).ok(), edge_homophily(&b).ok()),
            (node_homophily(&a).ok(), node_homophily(&b).ok()),
            (class_homophily(&a).ok(), class_homophily(&b).ok()),
            (adjusted_homophily(&a).ok(), adjusted_homophily(&b).ok()),
            (generalized_edge_homophily(&a).ok(), generalized_edge_homophily(&b).ok()),
            (aggregation_homophily(&a, AffinityKind::RenormRw).ok(), aggregation_homophily(&b, AffinityKind::RenormRw).ok()),
            (label_informativeness(&a).ok(), label_informativeness(&b).ok()),
            (neighbor_identifiability(&a).ok().map(|r| r.0), neighbor_identifiability(&b).ok().map(|r| r.0)),
        ];
        for (i, (u, v)) in pairs.into_iter().enumerate() {
            prop_assert!(close(&format!("metric {i}"), u, v).is_ok(), "metric {}: {:?} vs {:?}", i, u, v);
        }
    }

    #[test]
    fn sparse_aggregation_matches_dense_up_to_200_nodes(seed in any::<u64>(), n in 2usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = rng.random_range(1..=4.min(n));
        let mut y: Vec<usize> = (0..n).map(|i| if i < c { i } else { rng.random_range(0..c) }).collect();
        y.shuffle(&mut rng);
        let p = rng.random_range(0.0..0.2);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.random_bool(p)).collect();
        let d = Dense::new(n, &edges, &y, vec![vec![1.0]; n]);
        let sparse = aggregation_homophily(&d.graph(), AffinityKind::RenormRw).unwrap();
        prop_assert!((sparse - d.h_agg()).abs() <= 1e-10, "{} vs {}", sparse, d.h_agg());
    }

    #[test]
    fn ranges_hold(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_dense(&mut rng, 8).graph();
        let unit = |v: Option<f64>| v.is_none_or(|v| (-1e-12..=1.0 + 1e-12).contains(&v));
        prop_assert!(unit(edge_homophily(&g).ok()));
        prop_assert!(unit(node_homophily(&g).ok()));
        prop_assert!(unit(class_homophily(&g).ok()));
        prop_assert!(unit(aggregation_homophily(&g, AffinityKind::RenormRw).ok()));
        prop_assert!(unit(label_informativeness(&g).ok()));
        prop_assert!(unit(neighbor_identifiability(&g).ok().map(|r| r.0)));
        prop_assert!(generalized_edge_homophily(&g).ok().is_none_or(|v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&v)));
        if let Some(adj) = adjusted_homophily(&g).ok() {
            prop_assert!(adj <= 1.0 + 1e-12);
            let h = edge_homophily(&g).unwrap();
            prop_assert_eq!(h == 1.0, (adj - 1.0).abs() < 1e-12);
        }
    }
}
