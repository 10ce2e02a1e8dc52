use std::collections::HashSet;

use crate::cgan::GeneratedCandidate;
use crate::district::{validate, DecisionVector, Evaluation, ObjectiveTriple};
use crate::moo::Problem;

/// Why a candidate was dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    Constraint,
    ArchiveDuplicate,
    PoolDuplicate,
}

/// An admissible candidate with objectives from the evaluation function.
#[derive(Clone, Debug, PartialEq)]
pub struct VettedSolution {
    /// Index into the candidate pool.
    pub pool_index: usize,
    pub decision: DecisionVector,
    pub objectives: ObjectiveTriple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VetOutcome {
    pub admitted: Vec<VettedSolution>,
    /// One entry per pool candidate; `None` when admitted.
    pub rejections: Vec<Option<Rejection>>,
    /// `admitted / pool size`; `None` for an empty pool.
    pub ratio: Option<f64>,
}

impl VetOutcome {
    pub fn rejected(&self, why: Rejection) -> usize {
        self.rejections.iter().filter(|r| **r == Some(why)).count()
    }
}

/// Keeps candidates that satisfy the constraints, are not already in the
/// archive and were not generated earlier in the pool, then evaluates them.
pub fn vet_candidates<P: Problem>(pool: &[GeneratedCandidate], archive: &[DecisionVector], problem: &P) -> VetOutcome {
    let known: HashSet<DecisionVector> = archive.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut admitted = Vec::new();
    let mut rejections = Vec::with_capacity(pool.len());
    for (i, c) in pool.iter().enumerate() {
        let d = c.decision;
        let verdict = if !validate(&d).is_feasible() {
            Some(Rejection::Constraint)
        } else if known.contains(&d) {
            Some(Rejection::ArchiveDuplicate)
        } else if !seen.insert(d) {
            Some(Rejection::PoolDuplicate)
        } else {
            match problem.evaluate(&d) {
                Evaluation::Feasible(objectives) => {
                    admitted.push(VettedSolution { pool_index: i, decision: d, objectives });
                    None
                }
                Evaluation::Infeasible(_) => Some(Rejection::Constraint),
            }
        };
        rejections.push(verdict);
    }
    let ratio = (!pool.is_empty()).then(|| admitted.len() as f64 / pool.len() as f64);
    VetOutcome { admitted, rejections, ratio }
}
