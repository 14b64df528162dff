//! Sweep curves, discrete Fréchet distance and metric ranking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    /// Affine map of the curve's means onto `[0, 1]`; a constant curve maps to 0.5.
    MinMax,
}

/// A sweep curve: `x` strictly increasing, all coordinates finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    points: Vec<Point>,
    /// Per-point standard deviation across repeats, in the units of `y`.
    stdev: Vec<f64>,
}

impl Curve {
    pub fn new(label: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        let stdev = vec![0.0; points.len()];
        Self::with_stdev(label, points, stdev)
    }

    pub fn with_stdev(label: impl Into<String>, points: Vec<Point>, stdev: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if points.len() < 2 {
            return Err(Error::InvalidCurve(format!("{label}: need at least 2 points")));
        }
        if stdev.len() != points.len() {
            return Err(Error::InvalidCurve(format!("{label}: stdev length mismatch")));
        }
        if points.iter().flatten().chain(&stdev).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve(format!("{label}: non-finite coordinate")));
        }
        if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::InvalidCurve(format!("{label}: x must be strictly increasing")));
        }
        Ok(Curve { label, points, stdev })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn stdev(&self) -> &[f64] {
        &self.stdev
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Curve from per-level samples: `x = level / (levels - 1)`, `y` = mean over
/// samples, with the population standard deviation kept alongside.
pub fn build_curve(label: &str, per_level: &[Vec<f64>], normalization: Normalization) -> Result<Curve> {
    if per_level.len() < 2 {
        return Err(Error::MissingSeries(format!("{label}: fewer than 2 levels")));
    }
    if let Some(i) = per_level.iter().position(|s| s.is_empty()) {
        return Err(Error::MissingSeries(format!("{label}: no values at level {i}")));
    }
    let last = (per_level.len() - 1) as f64;
    let (mut ys, mut sds): (Vec<f64>, Vec<f64>) = per_level.iter().map(|s| mean_std(s)).unzip();
    if normalization == Normalization::MinMax {
        let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            ys.iter_mut().for_each(|y| *y = (*y - lo) / (hi - lo));
            sds.iter_mut().for_each(|s| *s /= hi - lo);
        } else {
            ys.iter_mut().for_each(|y| *y = 0.5);
        }
    }
    let points = ys.iter().enumerate().map(|(i, &y)| [i as f64 / last, y]).collect();
    Curve::with_stdev(label, points, sds)
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Discrete Fréchet distance between two point sequences (Euclidean metric),
/// by dynamic programming over the coupling lattice in `O(|p| |q|)`.
pub fn discrete_frechet_points(p: &[Point], q: &[Point]) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let m = q.len();
    let mut prev = vec![0.0; m];
    let mut cur = vec![0.0; m];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            let d = dist(pi, qj);
            let reach = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]),
            };
            cur[j] = d.max(reach);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}

pub fn discrete_frechet(p: &Curve, q: &Curve) -> Result<f64> {
    discrete_frechet_points(&p.points, &q.points)
}

/// Average rank of each metric across groups (generators). Within a group,
/// metrics are ranked ascending by distance and equal distances share the
/// mean of their rank positions.
///
/// `distances[metric][group]`; every metric must cover the same groups.
pub fn rank_metrics(distances: &BTreeMap<String, BTreeMap<String, f64>>) -> Result<BTreeMap<String, f64>> {
    let Some(first) = distances.values().next() else {
        return Err(Error::IncompleteTable("no metrics".into()));
    };
    let groups: Vec<&String> = first.keys().collect();
    if groups.is_empty() {
        return Err(Error::IncompleteTable("no generators".into()));
    }
    for (metric, row) in distances {
        if row.len() != groups.len() || groups.iter().any(|g| !row.contains_key(*g)) {
            return Err(Error::IncompleteTable(format!("{metric} does not cover every generator")));
        }
        if let Some((g, d)) = row.iter().find(|(_, d)| !d.is_finite()) {
            return Err(Error::IncompleteTable(format!("{metric}/{g}: non-finite distance {d}")));
        }
    }

    let mut totals: BTreeMap<String, f64> = distances.keys().map(|m| (m.clone(), 0.0)).collect();
    for group in &groups {
        let mut column: Vec<(&String, f64)> = distances.iter().map(|(m, row)| (m, row[*group])).collect();
        column.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut i = 0;
        while i < column.len() {
            let mut j = i;
            while j + 1 < column.len() && column[j + 1].1 == column[i].1 {
                j += 1;
            }
            // positions i..=j hold ranks i+1..=j+1
            let rank = (i + j) as f64 / 2.0 + 1.0;
            for (metric, _) in &column[i..=j] {
                *totals.get_mut(*metric).expect("metric key") += rank;
            }
            i = j + 1;
        }
    }
    let n = groups.len() as f64;
    Ok(totals.into_iter().map(|(m, t)| (m, t / n)).collect())
}
