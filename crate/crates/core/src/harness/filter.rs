use serde::Serialize;

use super::HarnessError;
use crate::cgan::Experiment;
use crate::district::{DecisionVector, ObjectiveTriple};
use crate::moo::SolutionArchive;

/// Median with the midpoint convention for even counts. Panics on empty input.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Medians {
    pub lcc: f64,
    pub ghg: f64,
    pub walkscore: f64,
}

impl Medians {
    pub fn of(objectives: &[ObjectiveTriple]) -> Self {
        let col = |f: fn(&ObjectiveTriple) -> f64| median(&objectives.iter().map(f).collect::<Vec<_>>());
        Self { lcc: col(|o| o.lcc), ghg: col(|o| o.ghg), walkscore: col(|o| o.walkscore) }
    }

    /// Whether a solution belongs to the experiment's training subset.
    /// Worst-half predicates are inclusive; the best-half predicate is the
    /// strict complement of each.
    pub fn admits(&self, e: Experiment, o: &ObjectiveTriple) -> bool {
        let worst_ghg = o.ghg >= self.ghg;
        let worst_lcc = o.lcc >= self.lcc;
        let worst_ws = o.walkscore <= self.walkscore;
        match e {
            Experiment::WorstHalfGHG => worst_ghg,
            Experiment::WorstHalfLCC => worst_lcc,
            Experiment::WorstHalfWalkScore => worst_ws,
            Experiment::WorstHalfAll => worst_ghg && worst_lcc && worst_ws,
            Experiment::BestHalfAll => !worst_ghg && !worst_lcc && !worst_ws,
            Experiment::FullData => true,
        }
    }
}

/// Feasible archive entries selected by the experiment, in archive order.
/// Medians are taken over every feasible archive entry.
pub fn filter_training_set(
    archive: &SolutionArchive,
    experiment: Experiment,
) -> Result<(Vec<(DecisionVector, ObjectiveTriple)>, Medians), HarnessError> {
    let feasible: Vec<(DecisionVector, ObjectiveTriple)> = archive.feasible().map(|(d, o)| (*d, o)).collect();
    if feasible.len() < 2 {
        return Err(HarnessError::TooFewFeasible(feasible.len()));
    }
    let objectives: Vec<ObjectiveTriple> = feasible.iter().map(|r| r.1).collect();
    let medians = Medians::of(&objectives);
    let subset: Vec<_> = feasible.into_iter().filter(|(_, o)| medians.admits(experiment, o)).collect();
    if subset.is_empty() {
        return Err(HarnessError::EmptyTrainingSet { experiment: experiment.to_string() });
    }
    Ok((subset, medians))
}
