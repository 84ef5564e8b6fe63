//! Plot emission: feature scatter, first-feature histogram and singular
//! spectrum lines, each as a standalone SVG plus a plain CSV twin.
//!
//! Class 1 is drawn as green crosses, class 2 as red circles.

use std::fmt::Write as _;

use crate::classify::class_order;
use crate::dataset::{FeatureRow, FeatureTable};
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 2] = ["#2ca02c", "#d62728"];

/// One emitted plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotOutput {
    pub svg: String,
    pub csv: String,
}

fn check_non_empty(table: &FeatureTable) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::Data("feature table is empty".into()));
    }
    Ok(())
}

/// Label order for colouring, by first appearance. Only the first two
/// classes get distinct colours.
fn classes(rows: &[FeatureRow]) -> Vec<String> {
    let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    class_order(&labels)
}

fn color(classes: &[String], label: &str) -> &'static str {
    let i = classes.iter().position(|c| c == label).unwrap_or(0);
    COLORS[i.min(1)]
}

/// "Nice" tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 {
        return vec![lo];
    }
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Maps data coordinates into the plotting area.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| {
            if hi > lo {
                let p = 0.05 * (hi - lo);
                (lo - p, hi + p)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Self { x: pad(x), y: pad(y) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn open(&self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(
            s,
            r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#
        );
        for t in ticks(self.x.0, self.x.1, 6) {
            let x = self.px(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                bottom + 5.0,
                bottom + 18.0,
                fmt_tick(t)
            );
        }
        for t in ticks(self.y.0, self.y.1, 6) {
            let y = self.py(t);
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                left - 5.0,
                left - 8.0,
                y + 4.0,
                fmt_tick(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 15.0,
            escape(xlabel)
        );
        let _ = writeln!(
            s,
            r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(ylabel)
        );
        s
    }
}

fn legend(s: &mut String, classes: &[String]) {
    for (i, c) in classes.iter().take(2).enumerate() {
        let y = MARGIN + 10.0 + 18.0 * i as f64;
        let x = WIDTH - MARGIN - 110.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            y - 9.0,
            COLORS[i],
            x + 16.0,
            y,
            escape(c)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Scatter of the first two features, one colour per class.
pub fn scatter_plot(table: &FeatureTable) -> Result<PlotOutput> {
    check_non_empty(table)?;
    if table.width() < 2 {
        return Err(Error::Data(format!(
            "scatter needs at least 2 features, table has {}",
            table.width()
        )));
    }
    let classes = classes(&table.rows);
    let frame = Frame::new(
        extent(table.rows.iter().map(|r| r.values[0])),
        extent(table.rows.iter().map(|r| r.values[1])),
    );
    let mut svg = frame.open("Two dominant nuclear features", "f1", "f2");
    let mut csv = String::from("trial_id,label,f1,f2\n");
    for r in &table.rows {
        let (x, y) = (frame.px(r.values[0]), frame.py(r.values[1]));
        let c = color(&classes, &r.label);
        if classes.first().is_some_and(|f| *f == r.label) {
            let _ = writeln!(
                svg,
                r#"<path d="M{:.2} {:.2} L{:.2} {:.2} M{:.2} {:.2} L{:.2} {:.2}" stroke="{c}" stroke-width="1.5"/>"#,
                x - 4.0,
                y - 4.0,
                x + 4.0,
                y + 4.0,
                x - 4.0,
                y + 4.0,
                x + 4.0,
                y - 4.0
            );
        } else {
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="none" stroke="{c}" stroke-width="1.5"/>"#
            );
        }
        let _ = writeln!(csv, "{},{},{},{}", r.trial_id, r.label, r.values[0], r.values[1]);
    }
    legend(&mut svg, &classes);
    svg.push_str("</svg>\n");
    Ok(PlotOutput { svg, csv })
}

/// Linear-interpolation quantile of sorted data, `q` in `[0, 1]`.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Upper bound on the number of histogram bins.
pub const MAX_BINS: usize = 200;

/// Bin edges by the Freedman–Diaconis rule, width `2 * IQR * m^(-1/3)`,
/// spanning `[min, max]` with equal-width bins. Falls back to a single bin
/// when the IQR or the range is zero.
pub fn freedman_diaconis_edges(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Data("histogram of empty data".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if hi == lo {
        return Ok(vec![lo - 0.5, hi + 0.5]);
    }
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    let bins = if width > 0.0 {
        (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS)
    } else {
        1
    };
    let step = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + step * i as f64).collect();
    edges.push(hi);
    Ok(edges)
}

/// Counts per bin; the last bin is closed on the right.
pub fn bin_counts(values: &[f64], edges: &[f64]) -> Vec<usize> {
    let bins = edges.len() - 1;
    let mut counts = vec![0; bins];
    for &v in values {
        if v < edges[0] || v > edges[bins] {
            continue;
        }
        let i = edges[1..].partition_point(|e| *e <= v).min(bins - 1);
        counts[i] += 1;
    }
    counts
}

/// Per-class histogram of the first feature on shared bins.
pub fn histogram_plot(table: &FeatureTable) -> Result<PlotOutput> {
    check_non_empty(table)?;
    let classes = classes(&table.rows);
    let all: Vec<f64> = table.rows.iter().map(|r| r.values[0]).collect();
    let edges = freedman_diaconis_edges(&all)?;
    let counts: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| {
            let v: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| &r.label == c)
                .map(|r| r.values[0])
                .collect();
            bin_counts(&v, &edges)
        })
        .collect();
    let peak = counts.iter().flatten().copied().max().unwrap_or(0) as f64;
    let frame = Frame::new((edges[0], edges[edges.len() - 1]), (0.0, peak.max(1.0)));
    let mut svg = frame.open("Histogram of first feature", "f1", "count");
    let _ = writeln!(svg, "<!-- bins: Freedman-Diaconis rule, {} bins -->", edges.len() - 1);
    let mut csv = format!(
        "# bins: Freedman-Diaconis rule, {} bins\nbin_lo,bin_hi",
        edges.len() - 1
    );
    for c in &classes {
        let _ = write!(csv, ",{c}");
    }
    csv.push('\n');
    for (b, w) in edges.windows(2).enumerate() {
        let _ = write!(csv, "{},{}", w[0], w[1]);
        for (ci, class_counts) in counts.iter().enumerate() {
            let _ = write!(csv, ",{}", class_counts[b]);
            let n = class_counts[b] as f64;
            if n > 0.0 {
                let (x0, x1) = (frame.px(w[0]), frame.px(w[1]));
                let (y0, y1) = (frame.py(n), frame.py(0.0));
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.5" stroke="{}"/>"#,
                    x1 - x0,
                    y1 - y0,
                    COLORS[ci.min(1)],
                    COLORS[ci.min(1)]
                );
            }
        }
        csv.push('\n');
    }
    legend(&mut svg, &classes);
    svg.push_str("</svg>\n");
    Ok(PlotOutput { svg, csv })
}

/// One polyline per trial: singular value against its index.
pub fn spectrum_plot(table: &FeatureTable) -> Result<PlotOutput> {
    check_non_empty(table)?;
    let classes = classes(&table.rows);
    let n = table.width();
    let frame = Frame::new(
        (1.0, n as f64),
        extent(table.rows.iter().flat_map(|r| r.values.iter().copied())),
    );
    let mut svg = frame.open("Singular values", "index", "singular value");
    let mut csv = String::from("trial_id,label,index,value\n");
    for r in &table.rows {
        let mut d = String::new();
        for (i, v) in r.values.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2} {:.2}",
                if i == 0 { "M" } else { " L" },
                frame.px((i + 1) as f64),
                frame.py(*v)
            );
            let _ = writeln!(csv, "{},{},{},{}", r.trial_id, r.label, i + 1, v);
        }
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-opacity="0.4"/>"#,
            color(&classes, &r.label)
        );
    }
    legend(&mut svg, &classes);
    svg.push_str("</svg>\n");
    Ok(PlotOutput { svg, csv })
}

/// Convex hull by monotone chain, counter-clockwise, without repeated or
/// collinear points.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

/// True when the convex hulls of the two point sets do not touch or
/// overlap, decided by the separating axis test.
pub fn convex_hulls_disjoint(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    let ha = convex_hull(a);
    let hb = convex_hull(b);
    if ha.is_empty() || hb.is_empty() {
        return true;
    }
    let mut axes = Vec::new();
    for h in [&ha, &hb] {
        for i in 0..h.len() {
            let (p, q) = (h[i], h[(i + 1) % h.len()]);
            if p == q {
                continue;
            }
            axes.push((-(q.1 - p.1), q.0 - p.0));
            if h.len() == 2 {
                axes.push((q.0 - p.0, q.1 - p.1));
            }
        }
    }
    if ha.len() == 1 && hb.len() == 1 {
        axes.push((hb[0].0 - ha[0].0, hb[0].1 - ha[0].1));
    }
    let project = |h: &[(f64, f64)], ax: (f64, f64)| extent(h.iter().map(|p| p.0 * ax.0 + p.1 * ax.1));
    axes.into_iter().any(|ax| {
        let (a_lo, a_hi) = project(&ha, ax);
        let (b_lo, b_hi) = project(&hb, ax);
        a_hi < b_lo || b_hi < a_lo
    })
}
