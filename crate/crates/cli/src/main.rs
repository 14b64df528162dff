use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use homophily_bench::bench::{
    frechet_csv, frechet_table, parse_curves_csv, ranking, ranking_csv, report, run_sweep, GeneratorConfig, GridRun,
    ModelRecord, SweepConfig, SweepResult,
};
use homophily_bench::classifiers::{grid_search, ModelKind, Split};
use homophily_bench::graph::{read_bundle, write_bundle, BundleMeta};
use homophily_bench::io::{read_to_string, write_atomic};
use homophily_bench::metrics::compute_report;
use homophily_bench::seed::cell_seed;

#[derive(Parser)]
#[command(name = "hbench", version, about = "Homophily metric benchmark on synthetic graph sweeps")]
struct Cli {
    /// Log level filter (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "info")]
    log: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Sweep configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one graph bundle from the config's generator template.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Sweep level: target edge homophily, mu, or integer beta. Defaults
        /// to the template's own value (beta 0 for GenCat).
        #[arg(long, allow_negative_numbers = true)]
        level: Option<f64>,
        /// Bundle directory to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute every metric of a graph bundle.
    Metrics {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: PathBuf,
        /// JSON file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-search one baseline model on a graph bundle.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: PathBuf,
        /// gcn, sgc1, mlp2 or mlp1.
        #[arg(long)]
        model: String,
        /// JSON file to write.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 means one per core.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run or resume a full sweep, then report on it.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 means one per core.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fréchet distance table from a curves file.
    Frechet {
        #[arg(long)]
        curves: PathBuf,
        /// Distance table to write.
        #[arg(long)]
        out: PathBuf,
        /// Also write the average-rank table here.
        #[arg(long)]
        ranking: Option<PathBuf>,
    },
    /// Curves, distances, ranking, markdown summary and plots for completed sweeps.
    Report {
        /// Config whose `[report]` section sets curve options.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sweep output directory; repeat for several generators.
        #[arg(long = "sweep", required = true)]
        sweeps: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(common: &Common) -> Result<SweepConfig> {
    let mut cfg = match &common.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn generate(common: &Common, level: Option<f64>, out: &Path) -> Result<()> {
    let cfg = load_config(common)?;
    cfg.validate()?;
    let base = cfg.generator.fit_base()?;
    let level = level.unwrap_or(match &cfg.generator {
        GeneratorConfig::Regular { spec, .. } => spec.target_edge_homophily,
        GeneratorConfig::Pa { spec, .. } => spec.homophily_coefficient,
        GeneratorConfig::Gencat { .. } => 0.0,
    });
    let (g, params) = cfg.generator.generate(level, cfg.seed, base.as_ref())?;
    write_bundle(out, &g, &BundleMeta::for_graph(&g, cfg.generator.kind_name(), params, cfg.seed))?;
    log::info!("wrote {} ({} nodes, {} edges)", out.display(), g.num_nodes(), g.num_edges());
    Ok(())
}

fn metrics(common: &Common, graph: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(common)?;
    let (g, _) = read_bundle(graph)?;
    let report = compute_report(&g, &cfg.metric_options, cfg.seed);
    write_json(out, &report)
}

fn train(common: &Common, graph: &Path, model: &str, out: &Path, jobs: Option<usize>) -> Result<()> {
    let cfg = load_config(common)?;
    cfg.validate()?;
    let kind = ModelKind::from_name(model).with_context(|| format!("unknown model `{model}`"))?;
    let (g, _) = read_bundle(graph)?;
    let split = Split::random(g.labels(), g.num_classes(), cfg.split, cell_seed(cfg.seed, 0, 0, "split"))?;
    let grid = cfg.grid.resolve();
    let start = std::time::Instant::now();
    let res = pool(jobs.unwrap_or(cfg.jobs))?
        .install(|| grid_search(&g, kind, &split, &grid, cell_seed(cfg.seed, 0, 0, kind.name())))?;
    log::info!(
        "{kind}: test accuracy {:.4} at validation {:.4}",
        res.outcome.test_accuracy,
        res.outcome.val_accuracy
    );
    let record = ModelRecord {
        model: kind,
        config: res.best,
        outcome: res.outcome,
        runs: res.runs.into_iter().map(|(config, outcome)| GridRun { config, outcome }).collect(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(out, &record)
}

fn sweep(common: &Common, out: Option<PathBuf>, jobs: Option<usize>) -> Result<()> {
    let mut cfg = load_config(common)?;
    if out.is_some() {
        cfg.out = out;
    }
    if let Some(j) = jobs {
        cfg.jobs = j;
    }
    let result = run_sweep(&cfg)?;
    let dir = cfg.out_dir();
    if !result.failures.is_empty() {
        for f in &result.failures {
            log::error!("level {} repeat {}: {}", f.level_index, f.repeat, f.message);
        }
        bail!("{} of {} cells failed; rerun to resume", result.failures.len(), result.levels.len() * result.repeats);
    }
    if result.metrics.is_empty() || result.models.is_empty() {
        log::info!("sweep complete in {}; no report without both metrics and models", dir.display());
        return Ok(());
    }
    report(&[&result], &cfg.report, &dir.join("report"))?;
    log::info!("sweep complete; report in {}", dir.join("report").display());
    Ok(())
}

fn frechet(curves: &Path, out: &Path, ranking_out: Option<&Path>) -> Result<()> {
    let parsed = parse_curves_csv(&read_to_string(curves)?, curves)?;
    let rows = frechet_table(&parsed)?;
    write_atomic(out, frechet_csv(&rows).as_bytes())?;
    if let Some(path) = ranking_out {
        write_atomic(path, ranking_csv(&ranking(&rows)?).as_bytes())?;
    }
    Ok(())
}

fn report_cmd(config: Option<&Path>, sweeps: &[PathBuf], out: &Path) -> Result<()> {
    let opts = match config {
        Some(path) => SweepConfig::load(path)?.report,
        None => SweepConfig::default().report,
    };
    let loaded = sweeps
        .iter()
        .map(|dir| SweepResult::load(dir).with_context(|| format!("loading sweep {}", dir.display())))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&SweepResult> = loaded.iter().collect();
    report(&refs, &opts, out)?;
    log::info!("report written to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, level, out } => generate(&common, level, &out),
        Command::Metrics { common, graph, out } => metrics(&common, &graph, &out),
        Command::Train { common, graph, model, out, jobs } => train(&common, &graph, &model, &out, jobs),
        Command::Sweep { common, out, jobs } => sweep(&common, out, jobs),
        Command::Frechet { curves, out, ranking } => frechet(&curves, &out, ranking.as_deref()),
        Command::Report { config, sweeps, out } => report_cmd(config.as_deref(), &sweeps, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log).format_timestamp_secs().init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
