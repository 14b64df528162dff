//! Error type shared by every module of the benchmark.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge endpoint {node} out of range for graph with {num_nodes} nodes")]
    EndpointOutOfRange { node: usize, num_nodes: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("label {label} of node {node} is out of range (num_classes = {num_classes})")]
    LabelOutOfRange {
        node: usize,
        label: usize,
        num_classes: usize,
    },

    #[error("class {0} has no nodes")]
    EmptyClass(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("node {0} has degree 0; use a renormalized affinity")]
    IsolatedNodeWithoutRenorm(usize),

    #[error("graph has no edges")]
    EmptyEdgeSet,

    #[error("degenerate denominator in {0}")]
    DegenerateDenominator(&'static str),

    #[error("class {0} has no node with a nonempty neighborhood")]
    EmptyClassNeighborhoods(usize),

    #[error("class {0} missing from the training split")]
    ClassMissingFromTrainSplit(usize),

    #[error("class {0} has no training rows")]
    ClassMissing(usize),

    #[error("kernel system is singular or has nonfinite entries")]
    SingularSystem,

    #[error("non-finite loss at epoch {epoch}: {loss}")]
    NonfiniteLoss { epoch: usize, loss: f64 },

    #[error("requested {requested} edges but only {capacity} distinct pairs exist")]
    EdgeBudgetExceedsCapacity { requested: usize, capacity: usize },

    #[error("beta {beta} outside the admissible range {min}..={max}")]
    BetaOutOfRange { beta: i32, min: i32, max: i32 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("curve is empty")]
    EmptyCurve,

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("series `{0}` missing from sweep")]
    MissingSeries(String),

    #[error("distance table incomplete: {0}")]
    IncompleteTable(String),

    #[error("sweep incomplete: {0}")]
    IncompleteSweep(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("cell (level {level}, repeat {repeat}): {source}")]
    Cell {
        level: usize,
        repeat: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
