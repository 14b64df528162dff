//! Curves, Fréchet distance tables, metric ranking and the human-readable
//! report of one or more completed sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::published::{published, published_distance, PUBLISHED_GENERATORS};
use super::svg::sweep_svg;
use super::sweep::{Series, SweepResult};
use crate::classifiers::ModelKind;
use crate::error::{Error, Result};
use crate::frechet::{build_curve, discrete_frechet, rank_metrics, Curve, Normalization};
use crate::io::{fmt_f64, parse_f64, write_atomic};
use crate::metrics::Metric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    /// Per-metric curve normalization; unlisted metrics are used as is.
    pub normalization: BTreeMap<Metric, Normalization>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        // the only metric whose range is not [0, 1]
        let normalization = BTreeMap::from([(Metric::AdjustedHomophily, Normalization::MinMax)]);
        ReportOptions { normalization }
    }
}

/// The curves of one sweep, metrics first, then models.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorCurves {
    pub generator: String,
    /// Generator family (`regular`, `pa`, `gencat`).
    pub kind: String,
    pub levels: Vec<f64>,
    pub curves: Vec<(Series, Curve)>,
}

impl GeneratorCurves {
    pub fn get(&self, series: Series) -> Option<&Curve> {
        self.curves.iter().find(|(s, _)| *s == series).map(|(_, c)| c)
    }

    pub fn metrics(&self) -> impl Iterator<Item = Metric> + '_ {
        self.curves.iter().filter_map(|(s, _)| match s {
            Series::Metric(m) => Some(*m),
            Series::Model(_) => None,
        })
    }

    pub fn models(&self) -> impl Iterator<Item = ModelKind> + '_ {
        self.curves.iter().filter_map(|(s, _)| match s {
            Series::Model(m) => Some(*m),
            Series::Metric(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub metric: Metric,
    pub generator: String,
    pub model: ModelKind,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub metric: Metric,
    pub model: ModelKind,
    pub avg_rank: f64,
}

pub fn sweep_curves(sweep: &SweepResult, opts: &ReportOptions) -> Result<GeneratorCurves> {
    let incomplete = |msg: String| Error::IncompleteSweep(format!("{}: {msg}", sweep.name));
    if sweep.metrics.is_empty() {
        return Err(incomplete("empty metric set".into()));
    }
    if sweep.models.is_empty() {
        return Err(incomplete("empty model set".into()));
    }
    if !sweep.is_complete() {
        let missing = sweep.levels.len() * sweep.repeats - sweep.records.len();
        let first = sweep.failures.first().map(|f| format!("; first: {}", f.message)).unwrap_or_default();
        return Err(incomplete(format!("{missing} of {} cells missing{first}", sweep.levels.len() * sweep.repeats)));
    }
    let mut curves = Vec::new();
    for series in sweep.series() {
        let normalization = match series {
            Series::Metric(m) => opts.normalization.get(&m).copied().unwrap_or_default(),
            Series::Model(_) => Normalization::None,
        };
        let curve = build_curve(series.name(), &sweep.level_samples(series), normalization).map_err(|e| match e {
            Error::MissingSeries(msg) => incomplete(format!("series {msg}")),
            other => other,
        })?;
        curves.push((series, curve));
    }
    Ok(GeneratorCurves { generator: sweep.name.clone(), kind: sweep.generator.clone(), levels: sweep.levels.clone(), curves })
}

pub fn curves_csv(all: &[GeneratorCurves]) -> String {
    let mut s = String::from("generator,kind,series,series_kind,level_index,level,x,y,std\n");
    for gc in all {
        for (series, c) in &gc.curves {
            for (i, (p, sd)) in c.points().iter().zip(c.stdev()).enumerate() {
                writeln!(
                    s,
                    "{},{},{series},{},{i},{},{},{},{}",
                    gc.generator,
                    gc.kind,
                    series.kind(),
                    fmt_f64(gc.levels[i]),
                    fmt_f64(p[0]),
                    fmt_f64(p[1]),
                    fmt_f64(*sd)
                )
                .unwrap();
            }
        }
    }
    s
}

/// Inverse of [`curves_csv`]; generators and series keep their file order.
pub fn parse_curves_csv(text: &str, path: &Path) -> Result<Vec<GeneratorCurves>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::parse(path, "empty file"))?;
    if header.trim() != "generator,kind,series,series_kind,level_index,level,x,y,std" {
        return Err(Error::parse(path, format!("unexpected header `{header}`")));
    }
    // (generator, kind, levels, series -> (points, stdev))
    type Pending = (String, String, Vec<f64>, Vec<(Series, Vec<[f64; 2]>, Vec<f64>)>);
    let mut pending: Vec<Pending> = Vec::new();
    for (lineno, line) in lines.enumerate().map(|(i, l)| (i + 2, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(Error::parse(path, format!("line {lineno}: expected 9 cells")));
        }
        let series: Series = cells[2].parse().map_err(|e: Error| Error::parse(path, format!("line {lineno}: {e}")))?;
        let index: usize =
            cells[4].parse().map_err(|e| Error::parse(path, format!("line {lineno}: level index: {e}")))?;
        let [level, x, y, sd] = [cells[5], cells[6], cells[7], cells[8]].map(|c| parse_f64(c, path));
        let (level, x, y, sd) = (level?, x?, y?, sd?);

        let gi = match pending.iter().position(|g| g.0 == cells[0]) {
            Some(i) => i,
            None => {
                pending.push((cells[0].to_string(), cells[1].to_string(), Vec::new(), Vec::new()));
                pending.len() - 1
            }
        };
        let g = &mut pending[gi];
        let si = match g.3.iter().position(|s| s.0 == series) {
            Some(i) => i,
            None => {
                g.3.push((series, Vec::new(), Vec::new()));
                g.3.len() - 1
            }
        };
        let s = &mut g.3[si];
        if index != s.1.len() {
            return Err(Error::parse(path, format!("line {lineno}: level index {index} out of order")));
        }
        s.1.push([x, y]);
        s.2.push(sd);
        if si == 0 {
            g.2.push(level);
        }
    }
    pending
        .into_iter()
        .map(|(generator, kind, levels, series)| {
            let curves = series
                .into_iter()
                .map(|(s, points, sd)| Ok((s, Curve::with_stdev(s.name(), points, sd)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(GeneratorCurves { generator, kind, levels, curves })
        })
        .collect()
}

/// Distance of every metric curve to every model curve, per generator,
/// ordered by model, metric, then generator.
pub fn frechet_table(all: &[GeneratorCurves]) -> Result<Vec<DistanceRow>> {
    let mut names: Vec<&str> = all.iter().map(|g| g.generator.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("generator names must be unique across sweeps".into()));
    }
    let Some(first) = all.first() else {
        return Err(Error::IncompleteSweep("no sweeps".into()));
    };
    let mut rows = Vec::new();
    for model in first.models() {
        for metric in first.metrics() {
            for gc in all {
                let missing = |s: Series| Error::IncompleteSweep(format!("{}: no {s} curve", gc.generator));
                let m = gc.get(Series::Metric(metric)).ok_or_else(|| missing(Series::Metric(metric)))?;
                let a = gc.get(Series::Model(model)).ok_or_else(|| missing(Series::Model(model)))?;
                rows.push(DistanceRow { metric, generator: gc.generator.clone(), model, distance: discrete_frechet(m, a)? });
            }
        }
    }
    Ok(rows)
}

/// Average rank of each metric across generators, separately per model.
pub fn ranking(rows: &[DistanceRow]) -> Result<Vec<RankRow>> {
    let mut models: Vec<ModelKind> = Vec::new();
    let mut metrics: Vec<Metric> = Vec::new();
    for r in rows {
        if !models.contains(&r.model) {
            models.push(r.model);
        }
        if !metrics.contains(&r.metric) {
            metrics.push(r.metric);
        }
    }
    let mut out = Vec::new();
    for model in models {
        let mut table: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for r in rows.iter().filter(|r| r.model == model) {
            table.entry(r.metric.name().to_string()).or_default().insert(r.generator.clone(), r.distance);
        }
        let ranks = rank_metrics(&table)?;
        for &metric in &metrics {
            out.push(RankRow { metric, model, avg_rank: ranks[metric.name()] });
        }
    }
    Ok(out)
}

pub fn frechet_csv(rows: &[DistanceRow]) -> String {
    let mut s = String::from("metric,generator,model,distance\n");
    for r in rows {
        writeln!(s, "{},{},{},{}", r.metric, r.generator, r.model, fmt_f64(r.distance)).unwrap();
    }
    s
}

pub fn ranking_csv(rows: &[RankRow]) -> String {
    let mut s = String::from("metric,model,avg_rank\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.metric, r.model, fmt_f64(r.avg_rank)).unwrap();
    }
    s
}

fn markdown(all: &[GeneratorCurves], sweeps: &[&SweepResult], rows: &[DistanceRow], ranks: &[RankRow]) -> String {
    let mut s = String::from("# Homophily metric benchmark\n\n");
    s.push_str("Distances are discrete Fréchet distances between a metric curve and a model's mean test-accuracy curve; ");
    s.push_str("x runs from 0 at the first sweep level to 1 at the last. Lower is better.\n\n");

    s.push_str("## Sweeps\n\n| generator | family | levels | repeats | first level | last level |\n|---|---|---|---|---|---|\n");
    for (gc, sw) in all.iter().zip(sweeps) {
        let (lo, hi) = (gc.levels[0], gc.levels[gc.levels.len() - 1]);
        writeln!(s, "| {} | {} | {} | {} | {lo} | {hi} |", gc.generator, gc.kind, gc.levels.len(), sw.repeats).unwrap();
    }

    s.push_str("\n## Mean test accuracy\n\n| generator | model | first level | last level | min | max |\n|---|---|---|---|---|---|\n");
    for gc in all {
        for model in gc.models() {
            let c = gc.get(Series::Model(model)).expect("model curve");
            let ys: Vec<f64> = c.points().iter().map(|p| p[1]).collect();
            let min = ys.iter().copied().fold(f64::INFINITY, f64::min);
            let max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            writeln!(
                s,
                "| {} | {} | {:.3} | {:.3} | {min:.3} | {max:.3} |",
                gc.generator,
                Series::Model(model).label(),
                ys[0],
                ys[ys.len() - 1]
            )
            .unwrap();
        }
    }

    let models: Vec<ModelKind> = ranks.iter().fold(Vec::new(), |mut v, r| {
        if !v.contains(&r.model) {
            v.push(r.model);
        }
        v
    });
    for model in models {
        let label = Series::Model(model).label();
        writeln!(s, "\n## Metric curve vs {label} curve\n").unwrap();
        s.push_str("| metric |");
        for gc in all {
            write!(s, " {} |", gc.generator).unwrap();
        }
        s.push_str(" avg rank |");
        let has_published = published(Metric::EdgeHomophily, model).is_some();
        if has_published {
            s.push_str(" published avg rank |");
        }
        s.push('\n');
        s.push_str(&"|---".repeat(all.len() + 2 + has_published as usize));
        s.push_str("|\n");
        for rank in ranks.iter().filter(|r| r.model == model) {
            write!(s, "| {} |", rank.metric.symbol()).unwrap();
            for gc in all {
                let d = rows
                    .iter()
                    .find(|r| r.model == model && r.metric == rank.metric && r.generator == gc.generator)
                    .map(|r| r.distance)
                    .unwrap_or(f64::NAN);
                match published_distance(rank.metric, model, &gc.kind) {
                    Some(p) => write!(s, " {d:.3} ({p:.2}) |").unwrap(),
                    None => write!(s, " {d:.3} |").unwrap(),
                }
            }
            write!(s, " {:.2} |", rank.avg_rank).unwrap();
            if let Some((_, p)) = published(rank.metric, model) {
                write!(s, " {p:.2} |").unwrap();
            }
            s.push('\n');
        }
        s.push('\n');
        for gc in all {
            let col: Vec<&DistanceRow> =
                rows.iter().filter(|r| r.model == model && r.generator == gc.generator).collect();
            let best = col.iter().min_by(|a, b| a.distance.total_cmp(&b.distance));
            let worst = col.iter().max_by(|a, b| a.distance.total_cmp(&b.distance));
            if let (Some(b), Some(w)) = (best, worst) {
                writeln!(
                    s,
                    "- {}: closest {} ({:.3}), farthest {} ({:.3})",
                    gc.generator,
                    b.metric.symbol(),
                    b.distance,
                    w.metric.symbol(),
                    w.distance
                )
                .unwrap();
            }
        }
    }
    if all.iter().any(|gc| PUBLISHED_GENERATORS.contains(&gc.kind.as_str())) {
        s.push_str("\nParenthesized values are the published distances for the same generator family. ");
        s.push_str("Absolute values depend on curve normalization and are not expected to match; rank order is the comparison target.\n");
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub curves: Vec<GeneratorCurves>,
    pub distances: Vec<DistanceRow>,
    pub ranking: Vec<RankRow>,
}

/// Writes `curves.csv`, `frechet.csv`, `ranking.csv`, `report.md` and one
/// `<generator>.svg` per sweep into `out`.
pub fn report(sweeps: &[&SweepResult], opts: &ReportOptions, out: &Path) -> Result<Report> {
    if sweeps.is_empty() {
        return Err(Error::IncompleteSweep("no sweeps to report".into()));
    }
    let curves = sweeps.iter().map(|s| sweep_curves(s, opts)).collect::<Result<Vec<_>>>()?;
    let distances = frechet_table(&curves)?;
    let ranking = ranking(&distances)?;
    write_atomic(&out.join("curves.csv"), curves_csv(&curves).as_bytes())?;
    write_atomic(&out.join("frechet.csv"), frechet_csv(&distances).as_bytes())?;
    write_atomic(&out.join("ranking.csv"), ranking_csv(&ranking).as_bytes())?;
    write_atomic(&out.join("report.md"), markdown(&curves, sweeps, &distances, &ranking).as_bytes())?;
    for gc in &curves {
        write_atomic(&out.join(format!("{}.svg", gc.generator)), sweep_svg(gc).as_bytes())?;
    }
    Ok(Report { curves, distances, ranking })
}
