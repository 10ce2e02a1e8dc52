//! NSGA-II over the district problem and the archive of every evaluation.

mod archive;
mod nsga2;
mod operators;
mod sorting;

pub use archive::{ArchiveError, ArchivedSolution, SolutionArchive, ARCHIVE_COLUMNS};
pub use nsga2::{run_nsga2, run_nsga2_with, tournament_winner, GaConfig, MooError, Problem};
pub use operators::{
    polynomial_mutation, polynomial_mutation_with_draws, sbx_crossover, sbx_crossover_with_draws, MutationDraw,
};
pub use sorting::{crowding_distance, dominates, non_dominated_sort};

use crate::district::{DecisionVector, Evaluation, ObjectiveTriple};

/// A decision vector together with its evaluation and NSGA-II bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub decision: DecisionVector,
    /// `None` for infeasible designs.
    pub objectives: Option<ObjectiveTriple>,
    /// Number of violated constraints; zero iff feasible.
    pub violations: usize,
    /// Front index, valid after sorting.
    pub rank: usize,
    /// Crowding distance, valid after sorting.
    pub crowding: f64,
}

impl Solution {
    pub fn new(decision: DecisionVector, evaluation: &Evaluation) -> Self {
        Self {
            decision,
            objectives: evaluation.objectives(),
            violations: evaluation.violation_count(),
            rank: 0,
            crowding: 0.0,
        }
    }

    pub fn feasible(objectives: ObjectiveTriple, decision: DecisionVector) -> Self {
        Self { decision, objectives: Some(objectives), violations: 0, rank: 0, crowding: 0.0 }
    }

    pub fn is_feasible(&self) -> bool {
        self.objectives.is_some()
    }
}
