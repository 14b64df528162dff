//! The eleven homophily metrics and their per-graph report.

mod cpm;
mod label;
mod similarity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AffinityKind, Graph};
use crate::io::fmt_opt;
use crate::seed;

pub use cpm::{
    cpm_accuracy_samples, cpm_pvalue, one_sided_pvalue, CpmClassifier, CpmOptions, SignificanceTest, CPM_MIN_NODES,
};
pub use label::{
    adjusted_homophily, class_homophily, class_wise_homophily, degree_class_distribution, edge_homophily,
    edge_label_joint, label_informativeness, neighbor_identifiability, neighbor_label_matrix, node_homophily,
};
pub use similarity::{aggregation_homophily, generalized_edge_homophily};

/// One curve-producing metric. `NeighborIdentifiability` refers to the
/// complement `1 - H_neighbor`, which grows with homophily like the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    EdgeHomophily,
    NodeHomophily,
    ClassHomophily,
    AdjustedHomophily,
    GeneralizedEdgeHomophily,
    AggregationHomophily,
    LabelInformativeness,
    NeighborIdentifiability,
    CpmGnb,
    CpmKrLinear,
    CpmKrNonlinear,
}

impl Metric {
    pub const ALL: [Metric; 11] = [
        Metric::EdgeHomophily,
        Metric::NodeHomophily,
        Metric::ClassHomophily,
        Metric::AdjustedHomophily,
        Metric::GeneralizedEdgeHomophily,
        Metric::AggregationHomophily,
        Metric::LabelInformativeness,
        Metric::NeighborIdentifiability,
        Metric::CpmGnb,
        Metric::CpmKrLinear,
        Metric::CpmKrNonlinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::EdgeHomophily => "edge_homophily",
            Metric::NodeHomophily => "node_homophily",
            Metric::ClassHomophily => "class_homophily",
            Metric::AdjustedHomophily => "adjusted_homophily",
            Metric::GeneralizedEdgeHomophily => "generalized_edge_homophily",
            Metric::AggregationHomophily => "aggregation_homophily",
            Metric::LabelInformativeness => "label_informativeness",
            Metric::NeighborIdentifiability => "neighbor_identifiability",
            Metric::CpmGnb => "cpm_gnb",
            Metric::CpmKrLinear => "cpm_kr_linear",
            Metric::CpmKrNonlinear => "cpm_kr_nonlinear",
        }
    }

    /// Short symbol used in tables and plots.
    pub fn symbol(self) -> &'static str {
        match self {
            Metric::EdgeHomophily => "H_edge",
            Metric::NodeHomophily => "H_node",
            Metric::ClassHomophily => "H_class",
            Metric::AdjustedHomophily => "H_adj",
            Metric::GeneralizedEdgeHomophily => "H_GE",
            Metric::AggregationHomophily => "H_agg",
            Metric::LabelInformativeness => "LI",
            Metric::NeighborIdentifiability => "H_neighbor",
            Metric::CpmGnb => "GNB",
            Metric::CpmKrLinear => "KR_L",
            Metric::CpmKrNonlinear => "KR_NL",
        }
    }

    pub fn is_cpm(self) -> bool {
        self.cpm_classifier().is_some()
    }

    pub fn cpm_classifier(self) -> Option<CpmClassifier> {
        match self {
            Metric::CpmGnb => Some(CpmClassifier::Gnb),
            Metric::CpmKrLinear => Some(CpmClassifier::KrLinear),
            Metric::CpmKrNonlinear => Some(CpmClassifier::KrNonlinear),
            _ => None,
        }
    }

    /// Value plotted on curves.
    pub fn curve_value(self, r: &MetricReport) -> Option<f64> {
        match self {
            Metric::EdgeHomophily => r.edge_homophily,
            Metric::NodeHomophily => r.node_homophily,
            Metric::ClassHomophily => r.class_homophily,
            Metric::AdjustedHomophily => r.adjusted_homophily,
            Metric::GeneralizedEdgeHomophily => r.generalized_edge_homophily,
            Metric::AggregationHomophily => r.aggregation_homophily,
            Metric::LabelInformativeness => r.label_informativeness,
            Metric::NeighborIdentifiability => r.neighbor_identifiability_complement,
            Metric::CpmGnb => r.cpm_gnb,
            Metric::CpmKrLinear => r.cpm_kr_linear,
            Metric::CpmKrNonlinear => r.cpm_kr_nonlinear,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s || m.symbol() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown metric `{s}`")))
    }
}

/// All metric values for one graph. A metric that is undefined on the graph
/// (degenerate denominator, too few nodes for CPM, ...) is `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub edge_homophily: Option<f64>,
    pub node_homophily: Option<f64>,
    pub class_homophily: Option<f64>,
    pub adjusted_homophily: Option<f64>,
    pub generalized_edge_homophily: Option<f64>,
    pub aggregation_homophily: Option<f64>,
    pub label_informativeness: Option<f64>,
    pub neighbor_identifiability: Option<f64>,
    pub neighbor_identifiability_complement: Option<f64>,
    pub cpm_gnb: Option<f64>,
    pub cpm_kr_linear: Option<f64>,
    pub cpm_kr_nonlinear: Option<f64>,
}

impl MetricReport {
    pub const CSV_FIELDS: [&'static str; 12] = [
        "edge_homophily",
        "node_homophily",
        "class_homophily",
        "adjusted_homophily",
        "generalized_edge_homophily",
        "aggregation_homophily",
        "label_informativeness",
        "neighbor_identifiability",
        "neighbor_identifiability_complement",
        "cpm_gnb",
        "cpm_kr_linear",
        "cpm_kr_nonlinear",
    ];

    pub fn values(&self) -> [Option<f64>; 12] {
        [
            self.edge_homophily,
            self.node_homophily,
            self.class_homophily,
            self.adjusted_homophily,
            self.generalized_edge_homophily,
            self.aggregation_homophily,
            self.label_informativeness,
            self.neighbor_identifiability,
            self.neighbor_identifiability_complement,
            self.cpm_gnb,
            self.cpm_kr_linear,
            self.cpm_kr_nonlinear,
        ]
    }

    pub fn csv_header() -> String {
        Self::CSV_FIELDS.join(",")
    }

    /// Empty cells stand for undefined metrics.
    pub fn csv_row(&self) -> String {
        self.values().iter().map(|v| fmt_opt(*v)).collect::<Vec<_>>().join(",")
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != Self::CSV_FIELDS.len() {
            return Err(Error::InvalidSpec(format!(
                "metric row has {} cells, expected {}",
                cells.len(),
                Self::CSV_FIELDS.len()
            )));
        }
        let mut v = [None; 12];
        for (slot, cell) in v.iter_mut().zip(&cells) {
            let cell = cell.trim();
            if !cell.is_empty() {
                *slot = Some(
                    cell.parse::<f64>()
                        .map_err(|e| Error::InvalidSpec(format!("bad metric value `{cell}`: {e}")))?,
                );
            }
        }
        Ok(MetricReport {
            edge_homophily: v[0],
            node_homophily: v[1],
            class_homophily: v[2],
            adjusted_homophily: v[3],
            generalized_edge_homophily: v[4],
            aggregation_homophily: v[5],
            label_informativeness: v[6],
            neighbor_identifiability: v[7],
            neighbor_identifiability_complement: v[8],
            cpm_gnb: v[9],
            cpm_kr_linear: v[10],
            cpm_kr_nonlinear: v[11],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricOptions {
    /// Operator inside `S = ÂY(ÂY)^T` for aggregation homophily.
    pub aggregation_affinity: AffinityKind,
    pub cpm: CpmOptions,
    /// Skip the three CPM metrics, which dominate the cost.
    pub skip_cpm: bool,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            aggregation_affinity: AffinityKind::RenormRw,
            cpm: CpmOptions::default(),
            skip_cpm: false,
        }
    }
}

fn defined(name: &str, r: Result<f64>) -> Option<f64> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            log::debug!("{name} undefined: {e}");
            None
        }
    }
}

/// Computes every metric. Each CPM classifier gets its own sub-seed of `seed`.
pub fn compute_report(g: &Graph, opts: &MetricOptions, seed: u64) -> MetricReport {
    let (raw, complement) = match neighbor_identifiability(g) {
        Ok((r, c)) => (Some(r), Some(c)),
        Err(e) => {
            log::debug!("neighbor_identifiability undefined: {e}");
            (None, None)
        }
    };
    let cpm = |c: CpmClassifier, idx: u64| {
        if opts.skip_cpm {
            None
        } else {
            defined("cpm", cpm_pvalue(g, c, seed::derive(seed, &[idx]), &opts.cpm))
        }
    };
    MetricReport {
        edge_homophily: defined("edge_homophily", edge_homophily(g)),
        node_homophily: defined("node_homophily", node_homophily(g)),
        class_homophily: defined("class_homophily", class_homophily(g)),
        adjusted_homophily: defined("adjusted_homophily", adjusted_homophily(g)),
        generalized_edge_homophily: defined("generalized_edge_homophily", generalized_edge_homophily(g)),
        aggregation_homophily: defined(
            "aggregation_homophily",
            aggregation_homophily(g, opts.aggregation_affinity),
        ),
        label_informativeness: defined("label_informativeness", label_informativeness(g)),
        neighbor_identifiability: raw,
        neighbor_identifiability_complement: complement,
        cpm_gnb: cpm(CpmClassifier::Gnb, 0),
        cpm_kr_linear: cpm(CpmClassifier::KrLinear, 1),
        cpm_kr_nonlinear: cpm(CpmClassifier::KrNonlinear, 2),
    }
}
