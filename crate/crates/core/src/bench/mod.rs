//! End-to-end pipeline: sweep configuration, resumable execution and
//! reporting.

mod config;
mod published;
mod report;
mod svg;
mod sweep;

pub use config::{GenCatBase, GeneratorConfig, GridPreset, GridSpec, SweepConfig};
pub use published::{published, published_distance, PublishedDistances, PUBLISHED, PUBLISHED_GENERATORS};
pub use report::{
    curves_csv, frechet_csv, frechet_table, parse_curves_csv, ranking, ranking_csv, report, sweep_curves, DistanceRow,
    GeneratorCurves, RankRow, Report, ReportOptions,
};
pub use svg::sweep_svg;
pub use sweep::{run_sweep, CellFailure, CellRecord, GridRun, LevelStat, ModelRecord, Series, SweepResult};
