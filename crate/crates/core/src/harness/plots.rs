//! Plot data for training curves and objective scatters, as CSV plus simple
//! SVG renderings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::io::{create_dir, num, parse_stats, read_csv, write_csv, write_text};
use super::{read_objective_rows, HarnessError, RunReport};
use crate::cgan::IterationStats;
use crate::district::ObjectiveTriple;

pub const RUNNING_WINDOW: usize = 10;
/// LCC cut-off of the zoomed scatter variants, $/m².
pub const PLOT_LCC_LIMIT: f64 = 10_000.0;

/// Trailing mean over `window` entries; the first `window − 1` entries
/// average the available prefix.
pub fn running_average(series: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for i in 0..series.len() {
        sum += series[i];
        if i >= window {
            sum -= series[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Inputs of [`emit_plots`].
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    /// Training history per run, by run name.
    pub curves: Vec<(String, Vec<IterationStats>)>,
    pub train: Vec<ObjectiveTriple>,
    pub gen: Vec<ObjectiveTriple>,
}

impl PlotData {
    pub fn from_report(report: &RunReport) -> Self {
        Self {
            curves: report.runs.iter().map(|r| (r.run.clone(), r.history.clone())).collect(),
            train: report.train_points.clone(),
            gen: report.gen_points.clone(),
        }
    }

    /// Rebuilds plot inputs from an experiment directory.
    pub fn load(dir: &Path) -> Result<Self, HarnessError> {
        let mut curves = Vec::new();
        for run in ["short", "long"] {
            let path = dir.join(run).join("history.csv");
            let (_, rows) = read_csv(&path)?;
            let history = rows.iter().map(|r| parse_stats(&path, r)).collect::<Result<_, _>>()?;
            curves.push((run.to_string(), history));
        }
        let objectives = |name: &str| -> Result<Vec<ObjectiveTriple>, HarnessError> {
            Ok(read_objective_rows(&dir.join(name))?.into_iter().map(|r| r.1).collect())
        };
        Ok(Self { curves, train: objectives("training_set.csv")?, gen: objectives("vetted.csv")? })
    }
}

type Column = fn(&IterationStats) -> f64;

/// Writes curve and scatter files into `dir` and returns their paths.
pub fn emit_plots(data: &PlotData, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    create_dir(dir)?;
    let mut written = Vec::new();

    for (run, history) in &data.curves {
        let columns: [(&str, Column); 4] = [
            ("d_loss", |s| s.d_loss),
            ("g_loss", |s| s.g_loss),
            ("acc_real", |s| s.acc_real),
            ("acc_fake", |s| s.acc_fake),
        ];
        let series: Vec<Vec<f64>> = columns.iter().map(|(_, f)| history.iter().map(f).collect()).collect();
        let averages: Vec<Vec<f64>> = series.iter().map(|s| running_average(s, RUNNING_WINDOW)).collect();
        let mut header = vec!["iteration".to_string()];
        header.extend(columns.iter().map(|(n, _)| n.to_string()));
        header.extend(columns.iter().map(|(n, _)| format!("{n}_avg")));
        let rows: Vec<Vec<String>> = (0..history.len())
            .map(|i| {
                let mut r = vec![history[i].iteration.to_string()];
                r.extend(series.iter().map(|s| num(s[i])));
                r.extend(averages.iter().map(|s| num(s[i])));
                r
            })
            .collect();
        let path = dir.join(format!("curves_{run}.csv"));
        write_csv(&path, &header, &rows)?;
        written.push(path);

        let x: Vec<f64> = history.iter().map(|s| s.iteration as f64).collect();
        for (title, picks) in [("loss", [0, 1]), ("accuracy", [2, 3])] {
            let mut lines = Vec::new();
            for (k, &c) in picks.iter().enumerate() {
                let colour = if k == 0 { "#1f77b4" } else { "#d62728" };
                lines.push(Series::line(columns[c].0, zip(&x, &series[c]), colour, 0.3));
                lines.push(Series::line(&format!("{} avg", columns[c].0), zip(&x, &averages[c]), colour, 1.0));
            }
            let path = dir.join(format!("{title}_{run}.svg"));
            write_text(&path, &svg(&format!("{title}, {run} run"), "iteration", title, &lines))?;
            written.push(path);
        }
    }

    for (name, y_label, y) in [
        ("ghg_vs_lcc", "GHG", (|o: &ObjectiveTriple| o.ghg) as fn(&ObjectiveTriple) -> f64),
        ("walkscore_vs_lcc", "WalkScore", |o: &ObjectiveTriple| o.walkscore),
    ] {
        for (suffix, limit) in [("", f64::INFINITY), ("_lcc_le_10k", PLOT_LCC_LIMIT)] {
            let pick = |set: &[ObjectiveTriple]| -> Vec<(f64, f64)> {
                set.iter().filter(|o| o.lcc <= limit).map(|o| (o.lcc, y(o))).collect()
            };
            let (train, gen) = (pick(&data.train), pick(&data.gen));
            for (set, points) in [("train", &train), ("gen", &gen)] {
                let rows: Vec<Vec<String>> = points.iter().map(|&(a, b)| vec![num(a), num(b)]).collect();
                let path = dir.join(format!("{name}{suffix}_{set}.csv"));
                write_csv(&path, &["lcc", y_label.to_lowercase().as_str()], &rows)?;
                written.push(path);
            }
            let path = dir.join(format!("{name}{suffix}.svg"));
            let series = [
                Series::marks("train", train, Mark::Cross, "#d62728"),
                Series::marks("gen", gen, Mark::Plus, "#1f77b4"),
            ];
            write_text(&path, &svg(&format!("{y_label} vs LCC"), "LCC ($/m²)", y_label, &series))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn zip(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    x.iter().copied().zip(y.iter().copied()).collect()
}

#[derive(Clone, Copy)]
enum Mark {
    Line,
    Cross,
    Plus,
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
    mark: Mark,
    colour: &'static str,
    opacity: f64,
}

impl Series {
    fn line(name: &str, points: Vec<(f64, f64)>, colour: &'static str, opacity: f64) -> Self {
        Self { name: name.to_string(), points, mark: Mark::Line, colour, opacity }
    }

    fn marks(name: &str, points: Vec<(f64, f64)>, mark: Mark, colour: &'static str) -> Self {
        Self { name: name.to_string(), points, mark, colour, opacity: 0.7 }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x0 == x1 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y0 == y1 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ =
        writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for (v, x, y, anchor) in [
        (x0, MARGIN, HEIGHT - MARGIN + 14.0, "start"),
        (x1, WIDTH - MARGIN, HEIGHT - MARGIN + 14.0, "end"),
        (y0, MARGIN - 4.0, HEIGHT - MARGIN, "end"),
        (y1, MARGIN - 4.0, MARGIN + 8.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{}</text>"#, tick(v));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    for (i, ser) in series.iter().enumerate() {
        let pts = ser.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite());
        match ser.mark {
            Mark::Line => {
                let path: Vec<String> = pts.map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{}" stroke-opacity="{}" points="{}"/>"#,
                    ser.colour,
                    ser.opacity,
                    path.join(" ")
                );
            }
            Mark::Cross | Mark::Plus => {
                let _ = write!(s, r#"<path stroke="{}" stroke-opacity="{}" d=""#, ser.colour, ser.opacity);
                for &(x, y) in pts {
                    let (cx, cy) = (sx(x), sy(y));
                    if matches!(ser.mark, Mark::Cross) {
                        let _ = write!(s, "M{:.1} {:.1}l6 6m0 -6l-6 6", cx - 3.0, cy - 3.0);
                    } else {
                        let _ = write!(s, "M{:.1} {:.1}h6m-3 -3v6", cx - 3.0, cy);
                    }
                }
                let _ = writeln!(s, r#""/>"#);
            }
        }
        let ly = MARGIN + 14.0 * (i as f64 + 1.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" text-anchor="end" fill="{}">{}</text>"#,
            WIDTH - MARGIN - 6.0,
            ser.colour,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_unchanged() {
        assert_eq!(running_average(&[2.5; 30], RUNNING_WINDOW), vec![2.5; 30]);
    }

    #[test]
    fn short_series_average_their_prefix() {
        assert_eq!(running_average(&[1.0, 3.0, 5.0], 10), vec![1.0, 2.0, 3.0]);
        let avg = running_average(&(1..=12).map(f64::from).collect::<Vec<_>>(), 10);
        assert_eq!(avg[9], 5.5);
        assert_eq!(avg[11], 7.5);
    }

    #[test]
    fn scatter_files_hold_every_point() {
        let dir = tempfile::tempdir().unwrap();
        let train: Vec<ObjectiveTriple> =
            (0..7).map(|i| ObjectiveTriple::new(4000.0 * i as f64, 1.0 + i as f64, 0.0)).collect();
        let gen = vec![ObjectiveTriple::new(-50.0, 0.5, 10.0); 3];
        let stats = IterationStats {
            iteration: 1,
            d_loss: 0.7,
            d_loss_real: 0.7,
            d_loss_fake: 0.7,
            g_loss: 0.7,
            acc_real: 0.5,
            acc_fake: 0.5,
        };
        let data = PlotData { curves: vec![("short".into(), vec![stats; 4])], train, gen };
        emit_plots(&data, dir.path()).unwrap();
        let rows = |name: &str| read_csv(&dir.path().join(name)).unwrap().1.len();
        assert_eq!(rows("ghg_vs_lcc_train.csv"), 7);
        assert_eq!(rows("walkscore_vs_lcc_gen.csv"), 3);
        // 0, 4000 and 8000 are within the limit
        assert_eq!(rows("ghg_vs_lcc_lcc_le_10k_train.csv"), 3);
        assert_eq!(rows("curves_short.csv"), 4);
        let svg = std::fs::read_to_string(dir.path().join("ghg_vs_lcc.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
