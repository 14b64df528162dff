//! Benchmark engine for graph homophily metrics.
//!
//! Synthetic graphs are swept across a homophily knob, each graph is scored by
//! eleven homophily metrics and four fine-tuned baseline models, and the
//! resulting metric curves are ranked by their discrete Fréchet distance to the
//! model performance curves.

pub mod bench;
pub mod classifiers;
pub mod error;
pub mod frechet;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{AffinityKind, Graph};
