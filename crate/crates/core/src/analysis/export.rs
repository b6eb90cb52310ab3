//! CSV files behind the plots, and minimal SVG renderings of them.
//!
//! | artifact      | columns                      |
//! |---------------|------------------------------|
//! | class stats   | `band,mean,std,class_id`     |
//! | projection    | `source,class_id,pc1,pc2`    |
//! | interpolation | `step,alpha,band,value`      |
//! | separation    | `train,test,accuracy`        |
//!
//! Floats are written with Rust's shortest round-trip formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::separation::SeparationGrid;
use super::stats::ClassStats;
use crate::dataio::SpectraTable;
use crate::error::{Error, Result};
use crate::gan::interpolation_alphas;
use crate::numerics::Matrix;

pub const CLASS_STATS_HEADER: &str = "band,mean,std,class_id";
pub const PROJECTION_HEADER: &str = "source,class_id,pc1,pc2";
pub const INTERPOLATION_HEADER: &str = "step,alpha,band,value";
pub const SEPARATION_HEADER: &str = "train,test,accuracy";

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoint {
    pub source: String,
    pub class_id: u16,
    pub pc1: f64,
    pub pc2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationPoint {
    pub step: usize,
    pub alpha: f64,
    pub band: usize,
    pub value: f64,
}

pub fn class_stats_csv(stats: &[ClassStats]) -> String {
    let mut s = format!("{CLASS_STATS_HEADER}\n");
    for c in stats {
        for (band, (m, sd)) in c.mean.iter().zip(&c.std).enumerate() {
            writeln!(s, "{band},{m},{sd},{}", c.class_id).expect("string write");
        }
    }
    s
}

/// Parses [`class_stats_csv`] output. Counts are not stored and come back as 0.
pub fn parse_class_stats_csv(text: &str) -> Result<Vec<ClassStats>> {
    let mut out: Vec<ClassStats> = Vec::new();
    for (line_no, fields) in records(text, CLASS_STATS_HEADER, 4)? {
        let band: usize = parse_field(&fields[0], line_no)?;
        let mean: f64 = parse_field(&fields[1], line_no)?;
        let std: f64 = parse_field(&fields[2], line_no)?;
        let class_id: u16 = parse_field(&fields[3], line_no)?;
        if out.last().is_none_or(|c| c.class_id != class_id) {
            out.push(ClassStats {
                class_id,
                mean: Vec::new(),
                std: Vec::new(),
                count: 0,
            });
        }
        let current = out.last_mut().expect("pushed");
        if band != current.mean.len() {
            return Err(Error::Format(format!("line {line_no}: band {band} out of order")));
        }
        current.mean.push(mean);
        current.std.push(std);
    }
    Ok(out)
}

pub fn projection_points(source: &str, table: &SpectraTable, coords: &Matrix) -> Vec<ProjectedPoint> {
    table
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &class_id)| ProjectedPoint {
            source: source.to_string(),
            class_id,
            pc1: coords.get(i, 0),
            pc2: coords.get(i, 1),
        })
        .collect()
}

pub fn projection_csv(points: &[ProjectedPoint]) -> String {
    let mut s = format!("{PROJECTION_HEADER}\n");
    for p in points {
        writeln!(s, "{},{},{},{}", p.source, p.class_id, p.pc1, p.pc2).expect("string write");
    }
    s
}

pub fn parse_projection_csv(text: &str) -> Result<Vec<ProjectedPoint>> {
    records(text, PROJECTION_HEADER, 4)?
        .into_iter()
        .map(|(n, f)| {
            Ok(ProjectedPoint {
                source: f[0].clone(),
                class_id: parse_field(&f[1], n)?,
                pc1: parse_field(&f[2], n)?,
                pc2: parse_field(&f[3], n)?,
            })
        })
        .collect()
}

pub fn interpolation_points(path: &SpectraTable) -> Vec<InterpolationPoint> {
    let alphas = interpolation_alphas(path.n_rows().max(2));
    (0..path.n_rows())
        .flat_map(|step| {
            let alpha = alphas[step];
            path.spectrum(step)
                .iter()
                .enumerate()
                .map(move |(band, &value)| InterpolationPoint { step, alpha, band, value })
        })
        .collect()
}

pub fn interpolation_csv(points: &[InterpolationPoint]) -> String {
    let mut s = format!("{INTERPOLATION_HEADER}\n");
    for p in points {
        writeln!(s, "{},{},{},{}", p.step, p.alpha, p.band, p.value).expect("string write");
    }
    s
}

pub fn parse_interpolation_csv(text: &str) -> Result<Vec<InterpolationPoint>> {
    records(text, INTERPOLATION_HEADER, 4)?
        .into_iter()
        .map(|(n, f)| {
            Ok(InterpolationPoint {
                step: parse_field(&f[0], n)?,
                alpha: parse_field(&f[1], n)?,
                band: parse_field(&f[2], n)?,
                value: parse_field(&f[3], n)?,
            })
        })
        .collect()
}

pub fn separation_csv(grid: &SeparationGrid) -> String {
    let mut s = format!("{SEPARATION_HEADER}\n");
    for (train, test, acc) in grid.entries() {
        writeln!(s, "{train},{test},{acc}").expect("string write");
    }
    s
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn records(text: &str, header: &str, width: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        other => {
            return Err(Error::Format(format!(
                "expected header {header:?}, found {:?}",
                other.map(|(_, h)| h)
            )))
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let fields: Vec<String> = l.split(',').map(|f| f.trim().to_string()).collect();
            if fields.len() != width {
                return Err(Error::Format(format!("line {}: expected {width} fields", i + 1)));
            }
            Ok((i + 1, fields))
        })
        .collect()
}

fn parse_field<T: std::str::FromStr>(raw: &str, line: usize) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Format(format!("line {line}: cannot parse {raw:?}")))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let (mut x, mut y) = ((f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY));
        for (px, py) in points {
            x = (x.0.min(px), x.1.max(px));
            y = (y.0.min(py), y.1.max(py));
        }
        let widen = |(lo, hi): (f64, f64)| {
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        Frame { x: widen(x), y: widen(y) }
    }

    fn map(&self, px: f64, py: f64) -> (f64, f64) {
        let sx = MARGIN + (px - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let sy = HEIGHT - MARGIN - (py - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (sx, sy)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <title>{title}</title>\n\
         <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
}

/// Scatter plot of projected points: one `<circle>` per point, colored by class,
/// hollow for sources other than `real`.
pub fn projection_svg(points: &[ProjectedPoint]) -> String {
    let frame = Frame::fit(points.iter().map(|p| (p.pc1, p.pc2)));
    let mut s = svg_open("PCA projection");
    for p in points {
        let (x, y) = frame.map(p.pc1, p.pc2);
        let color = PALETTE[p.class_id as usize % PALETTE.len()];
        let fill = if p.source == "real" { color } else { "none" };
        writeln!(
            s,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\" fill=\"{fill}\" stroke=\"{color}\"/>"
        )
        .expect("string write");
    }
    s.push_str("</svg>\n");
    s
}

fn polyline(s: &mut String, frame: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&(px, py)| {
            let (x, y) = frame.map(px, py);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let dash = if dashed { " stroke-dasharray=\"4 3\"" } else { "" };
    writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\"{dash}/>",
        coords.join(" ")
    )
    .expect("string write");
}

/// Mean spectrum per class with dashed mean ± std envelopes.
pub fn class_stats_svg(stats: &[ClassStats]) -> String {
    let frame = Frame::fit(stats.iter().flat_map(|c| {
        c.mean
            .iter()
            .zip(&c.std)
            .enumerate()
            .flat_map(|(b, (m, s))| [(b as f64, m - s), (b as f64, m + s)])
    }));
    let mut s = svg_open("Class mean and standard deviation");
    for c in stats {
        let color = PALETTE[c.class_id as usize % PALETTE.len()];
        let line = |sign: f64| -> Vec<(f64, f64)> {
            c.mean
                .iter()
                .zip(&c.std)
                .enumerate()
                .map(|(b, (m, sd))| (b as f64, m + sign * sd))
                .collect()
        };
        polyline(&mut s, &frame, &line(0.0), color, false);
        polyline(&mut s, &frame, &line(1.0), color, true);
        polyline(&mut s, &frame, &line(-1.0), color, true);
    }
    s.push_str("</svg>\n");
    s
}

/// One spectrum polyline per interpolation step, shaded from the first to the last.
pub fn interpolation_svg(points: &[InterpolationPoint]) -> String {
    let frame = Frame::fit(points.iter().map(|p| (p.band as f64, p.value)));
    let mut s = svg_open("Latent interpolation");
    let steps = points.iter().map(|p| p.step + 1).max().unwrap_or(0);
    for step in 0..steps {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|p| p.step == step)
            .map(|p| (p.band as f64, p.value))
            .collect();
        let alpha = points.iter().find(|p| p.step == step).map_or(0.0, |p| p.alpha);
        let red = (255.0 * alpha).round() as u8;
        let blue = 255 - red;
        polyline(&mut s, &frame, &pts, &format!("#{red:02x}30{blue:02x}"), false);
    }
    s.push_str("</svg>\n");
    s
}
