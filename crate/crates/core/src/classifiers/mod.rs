//! Baseline node classifiers and the training-free classifiers behind CPM.

mod gnb;
mod kernel;
mod models;
mod split;

pub use gnb::{gnb_fit_predict, GaussianNb, VAR_SMOOTHING};
pub use kernel::{kernel_regression_predict, Kernel, RIDGE_SCALE};
pub use models::{
    grid_search, grid_search_on, train_model, train_on, DropoutMasks, GridResult, Model, ModelData, ModelKind,
    TrainConfig, TrainGrid, TrainOutcome, ADAM_BETA1, ADAM_BETA2, ADAM_EPS,
};
pub use split::Split;
