//! Synthetic graph generators with a homophily control knob.

mod features;
mod gencat;
mod pa;
mod regular;

pub use features::{CircleFeatures, FeatureSource};
pub use gencat::{gencat_adjust, gencat_fit, gencat_generate, project_to_simplex, GenCatOptions, GenCatParams};
pub use pa::{class_distance, generate_pa, PaSpec, STANDARD_MU_LEVELS};
pub use regular::{generate_regular, RegularGraphSpec, STANDARD_LEVELS};
