//! Self-contained SVG plot of one sweep's curves with ±1 stdev bands.

use std::fmt::Write as _;

use super::report::GeneratorCurves;
use super::sweep::Series;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 700.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 470.0;

const MODEL_COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#1e8449", "#7d3c98"];
const METRIC_COLORS: [&str; 11] = [
    "#e67e22", "#17a589", "#d4ac0d", "#5dade2", "#af7ac5", "#ec7063", "#52be80", "#a04000", "#5d6d7e", "#f1948a",
    "#48c9b0",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_level(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').to_string()
    }
}

pub fn sweep_svg(gc: &GeneratorCurves) -> String {
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    for (_, c) in &gc.curves {
        for (p, sd) in c.points().iter().zip(c.stdev()) {
            lo = lo.min(p[1] - sd);
            hi = hi.max(p[1] + sd);
        }
    }
    let sx = |x: f64| LEFT + x * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - lo) / (hi - lo) * (BOTTOM - TOP);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{} ({})</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(&gc.generator),
        escape(&gc.kind)
    )
    .unwrap();

    for i in 0..=5 {
        let y = lo + (hi - lo) * i as f64 / 5.0;
        let py = sy(y);
        writeln!(s, r##"<line x1="{LEFT}" y1="{py:.1}" x2="{RIGHT}" y2="{py:.1}" stroke="#e5e5e5"/>"##).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{y:.2}</text>"#, LEFT - 6.0, py + 4.0).unwrap();
    }
    let n = gc.levels.len();
    let ticks = 6.min(n);
    for t in 0..ticks {
        let i = if ticks > 1 { t * (n - 1) / (ticks - 1) } else { 0 };
        let px = sx(i as f64 / (n - 1).max(1) as f64);
        writeln!(s, r##"<line x1="{px:.1}" y1="{TOP}" x2="{px:.1}" y2="{BOTTOM}" stroke="#f0f0f0"/>"##).unwrap();
        writeln!(s, r#"<text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"#, BOTTOM + 18.0, fmt_level(gc.levels[i]))
            .unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">sweep level</text>"#, (LEFT + RIGHT) / 2.0, BOTTOM + 40.0)
        .unwrap();
    writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    )
    .unwrap();

    let (mut model_i, mut metric_i) = (0, 0);
    let mut legend = Vec::new();
    for (series, c) in &gc.curves {
        let (color, width, dash) = match series {
            Series::Model(_) => {
                model_i += 1;
                (MODEL_COLORS[(model_i - 1) % MODEL_COLORS.len()], 2.5, "")
            }
            Series::Metric(_) => {
                metric_i += 1;
                (METRIC_COLORS[(metric_i - 1) % METRIC_COLORS.len()], 1.5, r#" stroke-dasharray="6 3""#)
            }
        };
        let upper = c.points().iter().zip(c.stdev()).map(|(p, sd)| format!("{:.2},{:.2}", sx(p[0]), sy(p[1] + sd)));
        let lower = c.points().iter().zip(c.stdev()).rev().map(|(p, sd)| format!("{:.2},{:.2}", sx(p[0]), sy(p[1] - sd)));
        let band: Vec<String> = upper.chain(lower).collect();
        writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.12" stroke="none"/>"#, band.join(" ")).unwrap();
        let line: Vec<String> = c.points().iter().map(|p| format!("{:.2},{:.2}", sx(p[0]), sy(p[1]))).collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"{dash}/>"#,
            line.join(" ")
        )
        .unwrap();
        legend.push((series.label(), color, width, dash));
    }
    for (i, (label, color, width, dash)) in legend.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * i as f64;
        let x = RIGHT + 25.0;
        writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="{width}"{dash}/>"#,
            x + 30.0
        )
        .unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x + 38.0, y + 4.0, escape(label)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
