//! Resumable sweep runner.
//!
//! Output layout:
//!
//! ```text
//! <out>/config.json           resolved config and the fingerprint stored cells depend on
//! <out>/sweep.json            manifest: levels, repeats, metric and model sets
//! <out>/gencat_base.json      fitted base parameters (GenCat only)
//! <out>/cells/LL/RR/graph/    graph bundle, when graphs are persisted
//! <out>/cells/LL/RR/metrics.json
//! <out>/cells/LL/RR/<model>.json
//! <out>/records.csv           one row per (level, repeat)
//! <out>/runs.csv              one row per evaluated grid configuration
//! <out>/sweep.csv             per-level mean and standard deviation of every series
//! <out>/timings.csv           wall-clock seconds per stage; not reproducible
//! ```
//!
//! Every stage of a cell is written atomically once it finishes and skipped
//! when its file already exists, so an interrupted sweep resumes where it
//! stopped. The merged CSVs are rebuilt from the cell files in (level,
//! repeat) order and do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::classifiers::{grid_search, ModelKind, Split, TrainConfig, TrainGrid, TrainOutcome};
use crate::error::{Error, Result};
use crate::generators::GenCatParams;
use crate::graph::{read_bundle, write_bundle, BundleMeta, Graph};
use crate::io::{fmt_f64, read_to_string, write_atomic};
use crate::metrics::{compute_report, Metric, MetricOptions, MetricReport};
use crate::seed::cell_seed;

/// A curve-producing column of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    Metric(Metric),
    Model(ModelKind),
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::Metric(m) => m.name(),
            Series::Model(m) => m.name(),
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            Series::Metric(_) => "metric",
            Series::Model(_) => "model",
        }
    }

    /// Display label for tables and plots.
    pub fn label(self) -> String {
        match self {
            Series::Metric(m) => m.symbol().to_string(),
            Series::Model(ModelKind::Gcn) => "GCN".into(),
            Series::Model(ModelKind::Sgc1) => "SGC-1".into(),
            Series::Model(ModelKind::Mlp2) => "MLP-2".into(),
            Series::Model(ModelKind::Mlp1) => "MLP-1".into(),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(m) = ModelKind::from_name(s) {
            return Ok(Series::Model(m));
        }
        s.parse::<Metric>()
            .map(Series::Metric)
            .map_err(|_| Error::InvalidSpec(format!("unknown series `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRun {
    pub config: TrainConfig,
    pub outcome: TrainOutcome,
}

/// Grid-search result of one model on one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub model: ModelKind,
    /// Best-validation configuration.
    pub config: TrainConfig,
    pub outcome: TrainOutcome,
    /// Every configuration of the lattice, in lattice order.
    pub runs: Vec<GridRun>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StoredMetrics {
    cpm_computed: bool,
    report: MetricReport,
    wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub level_index: usize,
    pub level: f64,
    pub repeat: usize,
    pub graph_id: String,
    pub graph_seed: u64,
    /// Bundle directory relative to the sweep output directory.
    pub bundle: Option<PathBuf>,
    pub metrics: MetricReport,
    pub metrics_seconds: f64,
    pub models: BTreeMap<ModelKind, ModelRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub level_index: usize,
    pub repeat: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    name: String,
    generator: String,
    seed: u64,
    levels: Vec<f64>,
    repeats: usize,
    metrics: Vec<Metric>,
    models: Vec<ModelKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub name: String,
    /// Generator family: `regular`, `pa` or `gencat`.
    pub generator: String,
    pub levels: Vec<f64>,
    pub repeats: usize,
    pub metrics: Vec<Metric>,
    pub models: Vec<ModelKind>,
    /// Completed cells in (level, repeat) order.
    pub records: Vec<CellRecord>,
    pub failures: Vec<CellFailure>,
}

/// Per-level summary of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStat {
    pub level_index: usize,
    pub level: f64,
    pub series: Series,
    pub count: usize,
    pub mean: f64,
    pub stdev: f64,
}

impl SweepResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty() && self.records.len() == self.levels.len() * self.repeats
    }

    pub fn series(&self) -> Vec<Series> {
        let metrics = self.metrics.iter().map(|&m| Series::Metric(m));
        metrics.chain(self.models.iter().map(|&m| Series::Model(m))).collect()
    }

    pub fn value(record: &CellRecord, series: Series) -> Option<f64> {
        match series {
            Series::Metric(m) => m.curve_value(&record.metrics),
            Series::Model(m) => record.models.get(&m).map(|r| r.outcome.test_accuracy),
        }
    }

    /// Defined values of `series`, grouped by level.
    pub fn level_samples(&self, series: Series) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); self.levels.len()];
        for r in &self.records {
            if let Some(v) = Self::value(r, series) {
                out[r.level_index].push(v);
            }
        }
        out
    }

    /// Population mean and standard deviation per (level, series); levels
    /// without a defined value are omitted.
    pub fn aggregate(&self) -> Vec<LevelStat> {
        let mut out = Vec::new();
        for series in self.series() {
            for (i, s) in self.level_samples(series).iter().enumerate() {
                if s.is_empty() {
                    continue;
                }
                let n = s.len() as f64;
                let mean = s.iter().sum::<f64>() / n;
                let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                out.push(LevelStat {
                    level_index: i,
                    level: self.levels[i],
                    series,
                    count: s.len(),
                    mean,
                    stdev: var.sqrt(),
                });
            }
        }
        out.sort_by_key(|s| s.level_index);
        out
    }

    pub fn records_csv(&self) -> String {
        let mut s = String::from("level_index,level,repeat,graph_id,graph_seed,bundle,");
        s.push_str(&MetricReport::csv_header());
        for m in &self.models {
            for col in ["test_accuracy", "val_accuracy", "best_epoch", "learning_rate", "weight_decay", "dropout"] {
                write!(s, ",{m}_{col}").unwrap();
            }
        }
        s.push('\n');
        for r in &self.records {
            let bundle = r.bundle.as_ref().map(|b| b.to_string_lossy().replace('\\', "/")).unwrap_or_default();
            write!(
                s,
                "{},{},{},{},{},{},{}",
                r.level_index,
                fmt_f64(r.level),
                r.repeat,
                r.graph_id,
                r.graph_seed,
                bundle,
                r.metrics.csv_row()
            )
            .unwrap();
            for m in &self.models {
                match r.models.get(m) {
                    Some(rec) => write!(
                        s,
                        ",{},{},{},{},{},{}",
                        fmt_f64(rec.outcome.test_accuracy),
                        fmt_f64(rec.outcome.val_accuracy),
                        rec.outcome.best_epoch,
                        fmt_f64(rec.config.learning_rate),
                        fmt_f64(rec.config.weight_decay),
                        fmt_f64(rec.config.dropout)
                    )
                    .unwrap(),
                    None => s.push_str(",,,,,,"),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn runs_csv(&self) -> String {
        let mut s = String::from(
            "graph_id,level_index,repeat,model,learning_rate,weight_decay,dropout,hidden_width,max_epochs,patience,\
             best_epoch,epochs_run,val_accuracy,test_accuracy,selected\n",
        );
        for r in &self.records {
            for (m, rec) in &r.models {
                for run in &rec.runs {
                    let c = &run.config;
                    let o = &run.outcome;
                    writeln!(
                        s,
                        "{},{},{},{m},{},{},{},{},{},{},{},{},{},{},{}",
                        r.graph_id,
                        r.level_index,
                        r.repeat,
                        fmt_f64(c.learning_rate),
                        fmt_f64(c.weight_decay),
                        fmt_f64(c.dropout),
                        c.hidden_width,
                        c.max_epochs,
                        c.patience,
                        o.best_epoch,
                        o.epochs_run,
                        fmt_f64(o.val_accuracy),
                        fmt_f64(o.test_accuracy),
                        *c == rec.config
                    )
                    .unwrap();
                }
            }
        }
        s
    }

    pub fn sweep_csv(&self) -> String {
        let mut s = String::from("level_index,level,series,kind,count,mean,std\n");
        for st in self.aggregate() {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                st.level_index,
                fmt_f64(st.level),
                st.series,
                st.series.kind(),
                st.count,
                fmt_f64(st.mean),
                fmt_f64(st.stdev)
            )
            .unwrap();
        }
        s
    }

    pub fn timings_csv(&self) -> String {
        let mut s = String::from("graph_id,stage,wall_seconds\n");
        for r in &self.records {
            writeln!(s, "{},metrics,{}", r.graph_id, fmt_f64(r.metrics_seconds)).unwrap();
            for (m, rec) in &r.models {
                writeln!(s, "{},{m},{}", r.graph_id, fmt_f64(rec.wall_seconds)).unwrap();
            }
        }
        s
    }

    pub fn write_csvs(&self, dir: &Path) -> Result<()> {
        write_atomic(&dir.join("records.csv"), self.records_csv().as_bytes())?;
        write_atomic(&dir.join("runs.csv"), self.runs_csv().as_bytes())?;
        write_atomic(&dir.join("sweep.csv"), self.sweep_csv().as_bytes())?;
        write_atomic(&dir.join("timings.csv"), self.timings_csv().as_bytes())
    }

    /// Reassembles a sweep from its output directory. Cells whose stage
    /// files are missing become failures.
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(&read_to_string(&dir.join("sweep.json"))?)?;
        let mut records = Vec::new();
        let mut failures = Vec::new();
        for l in 0..manifest.levels.len() {
            for r in 0..manifest.repeats {
                match load_cell(dir, &manifest, l, r) {
                    Ok(rec) => records.push(rec),
                    Err(e) => failures.push(CellFailure { level_index: l, repeat: r, message: e.to_string() }),
                }
            }
        }
        Ok(SweepResult {
            name: manifest.name,
            generator: manifest.generator,
            levels: manifest.levels,
            repeats: manifest.repeats,
            metrics: manifest.metrics,
            models: manifest.models,
            records,
            failures,
        })
    }
}

fn cell_rel_dir(level: usize, repeat: usize) -> PathBuf {
    Path::new("cells").join(format!("{level:02}")).join(format!("{repeat:02}"))
}

fn graph_id(name: &str, level: usize, repeat: usize) -> String {
    format!("{name}-{level:02}-{repeat:02}")
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::parse(path, e.to_string()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn load_cell(dir: &Path, manifest: &Manifest, l: usize, r: usize) -> Result<CellRecord> {
    let rel = cell_rel_dir(l, r);
    let cell = dir.join(&rel);
    let stored: StoredMetrics = read_json(&cell.join("metrics.json"))?;
    let mut models = BTreeMap::new();
    for &m in &manifest.models {
        models.insert(m, read_json::<ModelRecord>(&cell.join(format!("{m}.json")))?);
    }
    let bundle = rel.join("graph");
    Ok(CellRecord {
        level_index: l,
        level: manifest.levels[l],
        repeat: r,
        graph_id: graph_id(&manifest.name, l, r),
        graph_seed: cell_seed(manifest.seed, l, r, "graph"),
        bundle: dir.join(&bundle).join("meta.json").exists().then_some(bundle),
        metrics: stored.report,
        metrics_seconds: stored.wall_seconds,
        models,
    })
}

struct Sweep<'a> {
    cfg: &'a SweepConfig,
    name: String,
    out: PathBuf,
    levels: Vec<f64>,
    gencat: Option<GenCatParams>,
    grid: TrainGrid,
    metric_options: MetricOptions,
}

impl Sweep<'_> {
    fn graph<'g>(&self, cache: &'g mut Option<Graph>, level: f64, seed: u64, bundle: &Path) -> Result<&'g Graph> {
        if cache.is_none() {
            let g = if self.cfg.persist_graphs && bundle.join("meta.json").exists() {
                read_bundle(bundle)?.0
            } else {
                let (g, params) = self.cfg.generator.generate(level, seed, self.gencat.as_ref())?;
                if self.cfg.persist_graphs {
                    let meta = BundleMeta::for_graph(&g, self.cfg.generator.kind_name(), params, seed);
                    write_bundle(bundle, &g, &meta)?;
                }
                g
            };
            *cache = Some(g);
        }
        Ok(cache.as_ref().expect("graph cached above"))
    }

    /// Returns the record and whether any stage had to be computed.
    fn run_cell(&self, l: usize, r: usize) -> Result<(CellRecord, bool)> {
        let master = self.cfg.seed;
        let level = self.levels[l];
        let rel = cell_rel_dir(l, r);
        let dir = self.out.join(&rel);
        let bundle = dir.join("graph");
        let graph_seed = cell_seed(master, l, r, "graph");
        let mut graph = None;

        let metrics_path = dir.join("metrics.json");
        let needs_cpm = self.cfg.needs_cpm();
        let stored = match metrics_path.exists().then(|| read_json::<StoredMetrics>(&metrics_path)).transpose()? {
            Some(s) if s.cpm_computed || !needs_cpm => s,
            _ => {
                let g = self.graph(&mut graph, level, graph_seed, &bundle)?;
                let start = Instant::now();
                let opts = MetricOptions { skip_cpm: !needs_cpm, ..self.metric_options.clone() };
                let report = compute_report(g, &opts, cell_seed(master, l, r, "metrics"));
                let s = StoredMetrics { cpm_computed: needs_cpm, report, wall_seconds: start.elapsed().as_secs_f64() };
                write_json(&metrics_path, &s)?;
                s
            }
        };

        let mut models = BTreeMap::new();
        let mut split = None;
        for &m in &self.cfg.models {
            let path = dir.join(format!("{m}.json"));
            let rec = if path.exists() {
                read_json::<ModelRecord>(&path)?
            } else {
                let g = self.graph(&mut graph, level, graph_seed, &bundle)?;
                if split.is_none() {
                    let seed = cell_seed(master, l, r, "split");
                    split = Some(Split::random(g.labels(), g.num_classes(), self.cfg.split, seed)?);
                }
                let start = Instant::now();
                let res = grid_search(g, m, split.as_ref().expect("split drawn above"), &self.grid, cell_seed(master, l, r, m.name()))?;
                let strip = |mut o: TrainOutcome| {
                    o.losses.clear();
                    o
                };
                let rec = ModelRecord {
                    model: m,
                    config: res.best,
                    outcome: strip(res.outcome),
                    runs: res.runs.into_iter().map(|(config, o)| GridRun { config, outcome: strip(o) }).collect(),
                    wall_seconds: start.elapsed().as_secs_f64(),
                };
                write_json(&path, &rec)?;
                rec
            };
            models.insert(m, rec);
        }

        let computed = graph.is_some();
        let bundle_rel = rel.join("graph");
        let record = CellRecord {
            level_index: l,
            level,
            repeat: r,
            graph_id: graph_id(&self.name, l, r),
            graph_seed,
            bundle: (self.cfg.persist_graphs || bundle.join("meta.json").exists()).then_some(bundle_rel),
            metrics: stored.report,
            metrics_seconds: stored.wall_seconds,
            models,
        };
        Ok((record, computed))
    }
}

/// Runs (or resumes) every (level, repeat) cell of the sweep on a pool of
/// `cfg.jobs` workers and writes the merged CSVs. A failing cell is logged
/// and reported in `failures`; it does not stop the others.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    let fingerprint = cfg.fingerprint();
    let config_path = out.join("config.json");
    if config_path.exists() {
        let stored: serde_json::Value = read_json(&config_path)?;
        if stored.get("fingerprint") != Some(&fingerprint) {
            return Err(Error::Config(format!(
                "{} holds results of a different sweep configuration; choose another output directory",
                out.display()
            )));
        }
    }
    write_json(&config_path, &serde_json::json!({ "fingerprint": fingerprint, "config": cfg }))?;

    let gencat = cfg.generator.fit_base()?;
    if let Some(params) = &gencat {
        write_json(&out.join("gencat_base.json"), params)?;
    }
    let levels = cfg.generator.levels(gencat.as_ref())?;
    if levels.len() < 2 {
        return Err(Error::Config(format!("a sweep needs at least 2 levels, got {}", levels.len())));
    }
    let manifest = Manifest {
        name: cfg.name().to_string(),
        generator: cfg.generator.kind_name().to_string(),
        seed: cfg.seed,
        levels: levels.clone(),
        repeats: cfg.repeats,
        metrics: cfg.metrics.clone(),
        models: cfg.models.clone(),
    };
    write_json(&out.join("sweep.json"), &manifest)?;

    let sweep = Sweep {
        cfg,
        name: manifest.name.clone(),
        out: out.clone(),
        levels: levels.clone(),
        gencat,
        grid: cfg.grid.resolve(),
        metric_options: cfg.metric_options.clone(),
    };
    let cells: Vec<(usize, usize)> = (0..levels.len()).flat_map(|l| (0..cfg.repeats).map(move |r| (l, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let outcomes: Vec<Result<CellRecord>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(l, r)| {
                match sweep.run_cell(l, r) {
                    Ok((rec, true)) => {
                        log::info!("{} computed", rec.graph_id);
                        Ok(rec)
                    }
                    Ok((rec, false)) => {
                        log::debug!("{} already complete", rec.graph_id);
                        Ok(rec)
                    }
                    Err(e) => {
                        log::error!("cell (level {l}, repeat {r}) failed: {e}");
                        Err(Error::Cell { level: l, repeat: r, source: Box::new(e) })
                    }
                }
            })
            .collect()
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (&(l, r), res) in cells.iter().zip(outcomes) {
        match res {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push(CellFailure { level_index: l, repeat: r, message: e.to_string() }),
        }
    }
    let result = SweepResult {
        name: manifest.name,
        generator: manifest.generator,
        levels,
        repeats: cfg.repeats,
        metrics: cfg.metrics.clone(),
        models: cfg.models.clone(),
        records,
        failures,
    };
    result.write_csvs(&out)?;
    Ok(result)
}
