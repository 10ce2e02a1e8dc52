use std::path::Path;

use serde::Serialize;

use super::io::{num, opt, read_csv, write_csv};
use super::{HarnessError, Medians};
use crate::cgan::{Experiment, IterationStats};
use crate::district::{Direction, ObjectiveTriple};
use crate::metrics::{improvement_pct, BestObjectives};

/// Wall-clock seconds per stage. The GAN phase is training plus generation;
/// vetting and metrics are reported separately.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    /// `None` when the archive was produced by an earlier invocation that
    /// left no timing file.
    pub ga_seconds: Option<f64>,
    pub train_short_seconds: f64,
    pub train_long_seconds: f64,
    pub generate_seconds: f64,
    pub vet_seconds: f64,
    pub metrics_seconds: f64,
}

impl Timings {
    pub fn gan_seconds(&self) -> f64 {
        self.train_short_seconds + self.train_long_seconds + self.generate_seconds
    }

    pub(crate) fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        let rows = [
            ("ga", opt(self.ga_seconds)),
            ("train_short", num(self.train_short_seconds)),
            ("train_long", num(self.train_long_seconds)),
            ("generate", num(self.generate_seconds)),
            ("vet", num(self.vet_seconds)),
            ("metrics", num(self.metrics_seconds)),
            ("gan", num(self.gan_seconds())),
            ("runtime_ratio", opt(report_runtime_ratio(self))),
        ];
        let body: Vec<Vec<String>> = rows.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
        write_csv(path, &["stage", "seconds"], &body)
    }
}

/// GAN phase over GA phase; `None` without a positive GA time.
pub fn report_runtime_ratio(t: &Timings) -> Option<f64> {
    t.ga_seconds.filter(|&ga| ga > 0.0).map(|ga| t.gan_seconds() / ga)
}

/// Train/Gen/Improved triple of one column group. `gen` and `improved` are
/// empty when nothing was admitted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub train: f64,
    pub gen: Option<f64>,
    pub improved: Option<f64>,
}

impl Cell {
    pub fn new(train: f64, gen: Option<f64>, direction: Direction) -> Self {
        Self { train, gen, improved: gen.map(|g| improvement_pct(train, g, direction)) }
    }
}

/// One row of the results table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: Experiment,
    pub train_count: usize,
    /// Candidates before vetting.
    pub pool_count: usize,
    /// Admitted candidates.
    pub gen_count: usize,
    pub admissible: Option<f64>,
    pub min_ghg: Cell,
    pub min_lcc: Cell,
    pub max_walkscore: Cell,
    pub hypervolume: Cell,
}

pub(crate) const ROW_HEADER: [&str; 18] = [
    "experiment",
    "train_count",
    "pool_count",
    "gen_count",
    "admissible",
    "min_ghg_train",
    "min_ghg_gen",
    "min_ghg_improved",
    "min_lcc_train",
    "min_lcc_gen",
    "min_lcc_improved",
    "max_walkscore_train",
    "max_walkscore_gen",
    "max_walkscore_improved",
    "hv_train",
    "hv_gen",
    "hv_improved",
    "headline_groups",
];

impl ReportRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        experiment: Experiment,
        train_count: usize,
        pool_count: usize,
        train_best: &BestObjectives,
        gen_best: Option<&BestObjectives>,
        admissible: Option<f64>,
        gen_count: usize,
        hv: (f64, Option<f64>),
    ) -> Self {
        Self {
            experiment,
            train_count,
            pool_count,
            gen_count,
            admissible,
            min_ghg: Cell::new(train_best.min_ghg.0, gen_best.map(|b| b.min_ghg.0), Direction::Minimize),
            min_lcc: Cell::new(train_best.min_lcc.0, gen_best.map(|b| b.min_lcc.0), Direction::Minimize),
            max_walkscore: Cell::new(
                train_best.max_walkscore.0,
                gen_best.map(|b| b.max_walkscore.0),
                Direction::Maximize,
            ),
            hypervolume: Cell::new(hv.0, hv.1, Direction::Maximize),
        }
    }

    /// Column groups an experiment is judged on. Single-objective
    /// experiments only target their own objective; the other cells are
    /// still filled in.
    pub fn headline_groups(&self) -> &'static str {
        match self.experiment {
            Experiment::WorstHalfGHG => "min_ghg;hv",
            Experiment::WorstHalfLCC => "min_lcc;hv",
            Experiment::WorstHalfWalkScore => "max_walkscore;hv",
            _ => "min_ghg;min_lcc;max_walkscore;hv",
        }
    }

    pub(crate) fn cells(&self) -> Vec<String> {
        let mut r = vec![
            self.experiment.to_string(),
            self.train_count.to_string(),
            self.pool_count.to_string(),
            self.gen_count.to_string(),
            opt(self.admissible),
        ];
        for c in [self.min_ghg, self.min_lcc, self.max_walkscore, self.hypervolume] {
            r.extend([num(c.train), opt(c.gen), opt(c.improved)]);
        }
        r.push(self.headline_groups().to_string());
        r
    }

    pub fn write_csv(rows: &[ReportRow], path: &Path) -> Result<(), HarnessError> {
        let body: Vec<Vec<String>> = rows.iter().map(ReportRow::cells).collect();
        write_csv(path, &ROW_HEADER, &body)
    }

    /// Reads rows written by [`ReportRow::write_csv`].
    pub fn read_csv(path: &Path) -> Result<Vec<ReportRow>, HarnessError> {
        let (header, rows) = read_csv(path)?;
        let bad = |message: String| HarnessError::Format { path: path.display().to_string(), message };
        if header != ROW_HEADER {
            return Err(bad("unexpected report header".into()));
        }
        let f = |s: &str| -> Result<f64, HarnessError> { s.parse().map_err(|_| bad(format!("bad number {s:?}"))) };
        let o = |s: &str| -> Result<Option<f64>, HarnessError> {
            if s.is_empty() {
                Ok(None)
            } else {
                f(s).map(Some)
            }
        };
        let u = |s: &str| -> Result<usize, HarnessError> { s.parse().map_err(|_| bad(format!("bad count {s:?}"))) };
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let cell = |i: usize| -> Result<Cell, HarnessError> {
                Ok(Cell { train: f(&r[i])?, gen: o(&r[i + 1])?, improved: o(&r[i + 2])? })
            };
            out.push(ReportRow {
                experiment: r[0].parse().map_err(|_| bad(format!("unknown experiment {:?}", r[0])))?,
                train_count: u(&r[1])?,
                pool_count: u(&r[2])?,
                gen_count: u(&r[3])?,
                admissible: o(&r[4])?,
                min_ghg: cell(5)?,
                min_lcc: cell(8)?,
                max_walkscore: cell(11)?,
                hypervolume: cell(14)?,
            });
        }
        Ok(out)
    }
}

/// Rejection tallies from vetting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RejectionCounts {
    pub constraint: usize,
    pub archive_duplicate: usize,
    pub pool_duplicate: usize,
}

/// Snapshots a run contributed to the pool.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub run: String,
    pub seed_stream: u64,
    pub iterations: usize,
    pub selected_iterations: Vec<usize>,
    pub history: Vec<IterationStats>,
}

/// Everything an experiment reports. Every number in `row` can be
/// recomputed from the CSV files next to `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub row: ReportRow,
    pub seed: u64,
    pub generation_seed: u64,
    pub config_hash: String,
    pub medians: Medians,
    pub label_count: usize,
    pub count_per_label: usize,
    pub runs: Vec<RunSummary>,
    pub rejections: RejectionCounts,
    pub train_best: BestObjectives,
    pub gen_best: Option<BestObjectives>,
    pub train_points: Vec<ObjectiveTriple>,
    pub gen_points: Vec<ObjectiveTriple>,
    pub warnings: Vec<String>,
    pub timings: Timings,
    pub runtime_ratio: Option<f64>,
}
