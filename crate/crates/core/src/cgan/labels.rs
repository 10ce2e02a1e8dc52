use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CganError, LABEL_COUNT};

/// Points per objective in every label range.
pub const GRID_POINTS: usize = 5;

/// The six training-set experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Experiment {
    WorstHalfGHG,
    WorstHalfLCC,
    WorstHalfWalkScore,
    WorstHalfAll,
    BestHalfAll,
    FullData,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::WorstHalfGHG,
        Experiment::WorstHalfLCC,
        Experiment::WorstHalfWalkScore,
        Experiment::WorstHalfAll,
        Experiment::BestHalfAll,
        Experiment::FullData,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::WorstHalfGHG => "WorstHalfGHG",
            Experiment::WorstHalfLCC => "WorstHalfLCC",
            Experiment::WorstHalfWalkScore => "WorstHalfWalkScore",
            Experiment::WorstHalfAll => "WorstHalfAll",
            Experiment::BestHalfAll => "BestHalfAll",
            Experiment::FullData => "FullData",
        }
    }

    /// True for the three experiments that target a single objective.
    pub fn is_single_objective(self) -> bool {
        matches!(self, Experiment::WorstHalfGHG | Experiment::WorstHalfLCC | Experiment::WorstHalfWalkScore)
    }

    /// Label ranges in (LCC, GHG, WalkScore) order.
    pub fn label_ranges(self) -> [LabelRange; LABEL_COUNT] {
        const WIDE: LabelRange = LabelRange { start: -1.0, end: 1.0, step: 0.5 };
        const LOW_LCC: LabelRange = LabelRange { start: -1.0, end: -1.2, step: 0.1 };
        const LOW_GHG: LabelRange = LabelRange { start: -1.0, end: -1.2, step: 0.05 };
        const HIGH_WS: LabelRange = LabelRange { start: 1.0, end: 1.2, step: 0.1 };
        match self {
            Experiment::WorstHalfGHG => [WIDE, LOW_GHG, WIDE],
            Experiment::WorstHalfLCC => [LOW_LCC, WIDE, WIDE],
            Experiment::WorstHalfWalkScore => [WIDE, WIDE, HIGH_WS],
            _ => [LOW_LCC, LOW_GHG, HIGH_WS],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CganError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CganError::UnknownExperiment(s.to_string()))
    }
}

/// `[start, end, step]` with inclusive endpoints, in normalized label units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LabelRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl LabelRange {
    /// Values visited by stepping from `start` toward `end` by `step`.
    pub fn stepped_values(&self) -> Vec<f64> {
        let n = ((self.end - self.start).abs() / self.step + 1e-9).floor() as usize;
        let dir = (self.end - self.start).signum();
        (0..=n).map(|i| self.start + dir * self.step * i as f64).collect()
    }

    /// [`GRID_POINTS`] evenly spaced values from `start` to `end` inclusive.
    pub fn grid_values(&self) -> Vec<f64> {
        let last = (GRID_POINTS - 1) as f64;
        (0..GRID_POINTS).map(|i| self.start + (self.end - self.start) * i as f64 / last).collect()
    }
}

/// Normalized labels fed to the generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabelGrid {
    pub labels: Vec<[f64; LABEL_COUNT]>,
}

impl LabelGrid {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Distinct values taken by one label component, ascending.
    pub fn component_values(&self, k: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.labels.iter().map(|l| l[k]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

fn cartesian(ranges: &[LabelRange; LABEL_COUNT]) -> Vec<[f64; LABEL_COUNT]> {
    let [a, b, c] = ranges.map(|r| r.grid_values());
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
    for &x in &a {
        for &y in &b {
            for &z in &c {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// Cartesian product of the experiment's three label ranges. The
/// all-objective experiments also append the three single-objective grids.
pub fn build_label_grid(experiment: Experiment) -> LabelGrid {
    let mut labels = cartesian(&experiment.label_ranges());
    if !experiment.is_single_objective() {
        for single in [Experiment::WorstHalfGHG, Experiment::WorstHalfLCC, Experiment::WorstHalfWalkScore] {
            labels.extend(cartesian(&single.label_ranges()));
        }
    }
    LabelGrid { labels }
}
