//! On-disk graph bundle: `meta.json`, `edges.csv`, `labels.csv`, `features.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, parse_f64, read_to_string, write_dir_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub num_nodes: usize,
    pub num_classes: usize,
    pub num_features: usize,
    pub generator: String,
    #[serde(default)]
    pub params: serde_json::Value,
    pub seed: u64,
}

impl BundleMeta {
    pub fn for_graph(g: &Graph, generator: &str, params: serde_json::Value, seed: u64) -> Self {
        BundleMeta {
            num_nodes: g.num_nodes(),
            num_classes: g.num_classes(),
            num_features: g.num_features(),
            generator: generator.to_string(),
            params,
            seed,
        }
    }
}

pub fn write_bundle(dir: &Path, g: &Graph, meta: &BundleMeta) -> Result<()> {
    write_dir_atomic(dir, |tmp| {
        let meta_json = serde_json::to_string_pretty(meta)?;
        write(tmp, "meta.json", meta_json)?;

        let mut edges = String::new();
        for (u, v) in g.edges() {
            writeln!(edges, "{u},{v}").unwrap();
        }
        write(tmp, "edges.csv", edges)?;

        let mut labels = String::new();
        for y in g.labels() {
            writeln!(labels, "{y}").unwrap();
        }
        write(tmp, "labels.csv", labels)?;

        let x = g.features();
        let mut feats = String::with_capacity(x.nrows() * x.ncols() * 24);
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                if j > 0 {
                    feats.push(',');
                }
                feats.push_str(&fmt_f64(x[(i, j)]));
            }
            feats.push('\n');
        }
        write(tmp, "features.csv", feats)
    })
}

fn write(dir: &Path, name: &str, contents: String) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_bundle(dir: &Path) -> Result<(Graph, BundleMeta)> {
    let meta_path = dir.join("meta.json");
    let meta: BundleMeta = serde_json::from_str(&read_to_string(&meta_path)?)
        .map_err(|e| Error::parse(&meta_path, e.to_string()))?;

    let edges_path = dir.join("edges.csv");
    let mut edges = Vec::new();
    for line in read_to_string(&edges_path)?.lines().filter(|l| !l.trim().is_empty()) {
        let (u, v) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(&edges_path, format!("bad edge line `{line}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::parse(&edges_path, format!("bad node id `{s}`: {e}")))
        };
        edges.push((parse(u)?, parse(v)?));
    }

    let labels_path = dir.join("labels.csv");
    let labels = read_to_string(&labels_path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<usize>()
                .map_err(|e| Error::parse(&labels_path, format!("bad label `{l}`: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let feat_path = dir.join("features.csv");
    let mut values = Vec::with_capacity(meta.num_nodes * meta.num_features);
    let mut rows = 0;
    for line in read_to_string(&feat_path)?.lines().filter(|l| !l.trim().is_empty()) {
        let before = values.len();
        for tok in line.split(',') {
            values.push(parse_f64(tok, &feat_path)?);
        }
        if values.len() - before != meta.num_features {
            return Err(Error::parse(&feat_path, format!("row {rows} has wrong width")));
        }
        rows += 1;
    }
    if rows != labels.len() || rows != meta.num_nodes {
        return Err(Error::DimensionMismatch(format!(
            "bundle {} declares {} nodes, found {} feature rows and {} labels",
            dir.display(),
            meta.num_nodes,
            rows,
            labels.len()
        )));
    }
    let features = DMatrix::from_row_slice(rows, meta.num_features, &values);
    let g = Graph::build_with_classes(&edges, labels, features, meta.num_classes)?;
    Ok((g, meta))
}
