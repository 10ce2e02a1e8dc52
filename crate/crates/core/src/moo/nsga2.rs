use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::archive::{ArchivedSolution, SolutionArchive};
use super::operators::{polynomial_mutation, sbx_crossover};
use super::sorting::{crowding_distance, non_dominated_sort};
use super::Solution;
use crate::district::{DecisionVector, Evaluation, ReferenceModel, FIELD_COUNT, FIELD_RANGES};

#[derive(Debug, Error, PartialEq)]
pub enum MooError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
}

/// Anything that maps a design to an [`Evaluation`].
pub trait Problem: Sync {
    fn evaluate(&self, d: &DecisionVector) -> Evaluation;
}

impl Problem for ReferenceModel {
    fn evaluate(&self, d: &DecisionVector) -> Evaluation {
        ReferenceModel::evaluate(self, d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub mutation_prob: f64,
    pub crossover_prob: f64,
    pub eta: f64,
    pub rng_seed: u64,
    /// Evaluate each generation on the rayon pool. Results are identical
    /// either way.
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 128,
            generations: 512,
            mutation_prob: 0.05,
            crossover_prob: 0.75,
            eta: 2.5,
            rng_seed: 0,
            parallel: false,
        }
    }
}

impl GaConfig {
    /// 64 individuals over 64 generations.
    pub fn desk() -> Self {
        Self { population_size: 64, generations: 64, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), MooError> {
        let bad = |m: String| Err(MooError::InvalidConfig(m));
        if self.population_size < 2 {
            return bad(format!("population_size {} < 2", self.population_size));
        }
        for (name, p) in [("mutation_prob", self.mutation_prob), ("crossover_prob", self.crossover_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} {p} outside [0, 1]"));
            }
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta {} must be positive", self.eta));
        }
        Ok(())
    }
}

/// Binary tournament: lower rank wins, then larger crowding distance; a full
/// tie goes to the first contestant.
pub fn tournament_winner(a: &Solution, b: &Solution) -> bool {
    if a.rank != b.rank {
        return a.rank < b.rank;
    }
    a.crowding >= b.crowding
}

fn evaluate_all<P: Problem>(problem: &P, designs: &[DecisionVector], parallel: bool) -> Vec<Solution> {
    if parallel {
        designs.par_iter().map(|d| Solution::new(*d, &problem.evaluate(d))).collect()
    } else {
        designs.iter().map(|d| Solution::new(*d, &problem.evaluate(d))).collect()
    }
}

/// Assigns rank and crowding in place and returns the fronts.
fn rank_population(pop: &mut [Solution]) -> Vec<Vec<usize>> {
    let fronts = non_dominated_sort(pop);
    for (r, front) in fronts.iter().enumerate() {
        let feasible = pop[front[0]].is_feasible();
        let distances = if feasible {
            let points: Vec<[f64; 3]> = front.iter().map(|&i| pop[i].objectives.unwrap().minimization_form()).collect();
            crowding_distance(&points)
        } else {
            vec![0.0; front.len()]
        };
        for (&i, c) in front.iter().zip(distances) {
            pop[i].rank = r;
            pop[i].crowding = c;
        }
    }
    fronts
}

/// Elitist truncation of the merged population to `n` survivors.
fn environmental_selection(mut merged: Vec<Solution>, n: usize) -> Vec<Solution> {
    let fronts = rank_population(&mut merged);
    let mut keep = Vec::with_capacity(n);
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            let mut last = front;
            last.sort_by(|&a, &b| merged[b].crowding.total_cmp(&merged[a].crowding).then(a.cmp(&b)));
            last.truncate(n - keep.len());
            keep.extend(last);
        }
        if keep.len() == n {
            break;
        }
    }
    let mut survivors: Vec<Solution> = keep.into_iter().map(|i| merged[i].clone()).collect();
    rank_population(&mut survivors);
    survivors
}

fn select<'a>(pop: &'a [Solution], rng: &mut ChaCha8Rng) -> &'a Solution {
    let a = &pop[rng.random_range(0..pop.len())];
    let b = &pop[rng.random_range(0..pop.len())];
    if tournament_winner(a, b) {
        a
    } else {
        b
    }
}

/// Runs NSGA-II on the reference model.
pub fn run_nsga2(cfg: &GaConfig, problem: &ReferenceModel) -> Result<SolutionArchive, MooError> {
    run_nsga2_with(cfg, problem, |_, _| {})
}

/// Runs NSGA-II, calling `on_generation(generation, population)` after the
/// initial population and after every generation's survivor selection.
pub fn run_nsga2_with<P: Problem>(
    cfg: &GaConfig,
    problem: &P,
    mut on_generation: impl FnMut(usize, &[Solution]),
) -> Result<SolutionArchive, MooError> {
    cfg.validate()?;
    let n = cfg.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut archive = SolutionArchive::new();

    let initial: Vec<DecisionVector> = (0..n)
        .map(|_| {
            let mut v = [0i32; FIELD_COUNT];
            for (f, x) in v.iter_mut().enumerate() {
                *x = rng.random_range(FIELD_RANGES[f].0..=FIELD_RANGES[f].1);
            }
            DecisionVector::from_array(v)
        })
        .collect();
    let mut pop = evaluate_all(problem, &initial, cfg.parallel);
    record(&mut archive, 0, &pop);
    rank_population(&mut pop);
    on_generation(0, &pop);

    for generation in 1..=cfg.generations {
        let mut children = Vec::with_capacity(n + 1);
        while children.len() < n {
            let p1 = select(&pop, &mut rng).decision;
            let p2 = select(&pop, &mut rng).decision;
            let (c1, c2) = if rng.random::<f64>() < cfg.crossover_prob {
                sbx_crossover(&p1, &p2, cfg.eta, &mut rng)
            } else {
                (p1, p2)
            };
            children.push(polynomial_mutation(&c1, cfg.eta, cfg.mutation_prob, &mut rng));
            children.push(polynomial_mutation(&c2, cfg.eta, cfg.mutation_prob, &mut rng));
        }
        children.truncate(n);
        let offspring = evaluate_all(problem, &children, cfg.parallel);
        record(&mut archive, generation, &offspring);
        let mut merged = pop;
        merged.extend(offspring);
        pop = environmental_selection(merged, n);
        on_generation(generation, &pop);
        log::debug!("generation {generation}: {} evaluations", archive.len());
    }
    Ok(archive)
}

fn record(archive: &mut SolutionArchive, generation: usize, solutions: &[Solution]) {
    for s in solutions {
        archive.push(ArchivedSolution { generation, decision: s.decision, objectives: s.objectives });
    }
}
