//! Quality indicators: min-max scaling, 3-D hypervolume, best objectives and
//! improvement percentages.

mod hypervolume;

pub use hypervolume::{
    cumulative_hypervolume, hypervolume, hypervolume_oracle, hypervolume_with_reference, non_dominated_points,
    ORACLE_MAX_POINTS,
};

use serde::Serialize;
use thiserror::Error;

use crate::district::{DecisionVector, Direction, ObjectiveTriple, OBJECTIVE_DIRECTIONS, OBJECTIVE_NAMES};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("cannot compute {0} of an empty set")]
    Empty(&'static str),
    #[error("inclusion-exclusion oracle limited to {max} points, got {got}")]
    TooManyPoints { got: usize, max: usize },
}

/// Most and least desirable value of each objective, in natural units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Anchors {
    pub best: ObjectiveTriple,
    pub worst: ObjectiveTriple,
}

impl Anchors {
    pub fn from_objectives<'a>(
        objectives: impl IntoIterator<Item = &'a ObjectiveTriple>,
    ) -> Result<Self, MetricsError> {
        let mut best = [f64::INFINITY; 3];
        let mut worst = [f64::NEG_INFINITY; 3];
        let mut any = false;
        for o in objectives {
            any = true;
            for (k, m) in o.minimization_form().into_iter().enumerate() {
                best[k] = best[k].min(m);
                worst[k] = worst[k].max(m);
            }
        }
        if !any {
            return Err(MetricsError::Empty("scaling anchors"));
        }
        let natural =
            |v: [f64; 3]| ObjectiveTriple::from_array([0, 1, 2].map(|k| -OBJECTIVE_DIRECTIONS[k].sign() * v[k]));
        Ok(Self { best: natural(best), worst: natural(worst) })
    }
}

/// Points mapped so that 0 is the best anchor and 1 the worst, all objectives
/// minimized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledFront {
    pub points: Vec<[f64; 3]>,
    pub anchors: Anchors,
    pub warnings: Vec<String>,
}

impl ScaledFront {
    /// Points clamped into the unit cube, as used for hypervolume.
    pub fn clamped(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(|p| p.map(|v| v.clamp(0.0, 1.0))).collect()
    }

    pub fn hypervolume(&self) -> f64 {
        hypervolume(&self.clamped())
    }
}

pub fn minmax_scale(points: &[ObjectiveTriple], anchors: &Anchors) -> ScaledFront {
    let best = anchors.best.minimization_form();
    let worst = anchors.worst.minimization_form();
    let mut warnings = Vec::new();
    for k in 0..3 {
        if worst[k] == best[k] {
            warnings.push(format!(
                "{} has a degenerate scaling range (best = worst = {}); scaled values set to 0",
                OBJECTIVE_NAMES[k],
                anchors.best.to_array()[k]
            ));
        }
    }
    let scaled = points
        .iter()
        .map(|o| {
            let m = o.minimization_form();
            [0, 1, 2].map(|k| if worst[k] == best[k] { 0.0 } else { (m[k] - best[k]) / (worst[k] - best[k]) })
        })
        .collect();
    ScaledFront { points: scaled, anchors: *anchors, warnings }
}

/// Inverse of [`minmax_scale`] for non-degenerate anchors.
pub fn unscale(point: &[f64; 3], anchors: &Anchors) -> ObjectiveTriple {
    let best = anchors.best.minimization_form();
    let worst = anchors.worst.minimization_form();
    ObjectiveTriple::from_array(
        [0, 1, 2].map(|k| -OBJECTIVE_DIRECTIONS[k].sign() * (best[k] + point[k] * (worst[k] - best[k]))),
    )
}

/// Relative change from `train` to `gen`, in percent, signed so that an
/// improvement in the given direction is positive. A zero training value
/// falls back to the generated value as the base.
pub fn improvement_pct(train: f64, gen: f64, direction: Direction) -> f64 {
    let base = if train != 0.0 {
        train.abs()
    } else if gen != 0.0 {
        gen.abs()
    } else {
        return 0.0;
    };
    // adding zero turns a -0.0 for unchanged values into 0.0
    direction.sign() * (gen - train) / base * 100.0 + 0.0
}

/// Per-objective extremes with the first solution achieving each.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestObjectives {
    pub min_ghg: (f64, DecisionVector),
    pub min_lcc: (f64, DecisionVector),
    pub max_walkscore: (f64, DecisionVector),
}

pub fn extract_best(solutions: &[(DecisionVector, ObjectiveTriple)]) -> Result<BestObjectives, MetricsError> {
    let (first_d, first_o) = solutions.first().ok_or(MetricsError::Empty("best objectives"))?;
    let mut best = BestObjectives {
        min_ghg: (first_o.ghg, *first_d),
        min_lcc: (first_o.lcc, *first_d),
        max_walkscore: (first_o.walkscore, *first_d),
    };
    for (d, o) in &solutions[1..] {
        if o.ghg < best.min_ghg.0 {
            best.min_ghg = (o.ghg, *d);
        }
        if o.lcc < best.min_lcc.0 {
            best.min_lcc = (o.lcc, *d);
        }
        if o.walkscore > best.max_walkscore.0 {
            best.max_walkscore = (o.walkscore, *d);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchors() -> Anchors {
        Anchors { best: ObjectiveTriple::new(-100.0, 1.0, 15.0), worst: ObjectiveTriple::new(300.0, 5.0, 0.0) }
    }

    #[test]
    fn anchor_points_map_to_cube_corners() {
        let a = anchors();
        let s = minmax_scale(&[a.best, a.worst, ObjectiveTriple::new(100.0, 3.0, 7.5)], &a);
        assert_eq!(s.points, vec![[0.0; 3], [1.0; 3], [0.5; 3]]);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn anchors_from_objectives_respect_direction() {
        let pts = [ObjectiveTriple::new(300.0, 1.0, 0.0), ObjectiveTriple::new(-100.0, 5.0, 15.0)];
        assert_eq!(Anchors::from_objectives(&pts).unwrap(), anchors());
        assert!(Anchors::from_objectives(&[]).is_err());
    }

    #[test]
    fn degenerate_objective_scales_to_zero_with_warning() {
        let a = Anchors { best: ObjectiveTriple::new(0.0, 1.0, 0.0), worst: ObjectiveTriple::new(10.0, 2.0, 0.0) };
        let s = minmax_scale(&[ObjectiveTriple::new(5.0, 1.5, 15.0)], &a);
        assert_eq!(s.points, vec![[0.5, 0.5, 0.0]]);
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].starts_with("walkscore"));
    }

    #[test]
    fn scaling_round_trips() {
        let a = anchors();
        let o = ObjectiveTriple::new(17.25, 2.125, 3.0);
        let s = minmax_scale(&[o], &a);
        let back = unscale(&s.points[0], &a);
        for (x, y) in back.to_array().iter().zip(o.to_array()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn improvement_examples() {
        // rounded inputs: the formula gives 78.65, not 78.7
        let lcc = improvement_pct(-4281.0, -7648.0, Direction::Minimize);
        assert!((lcc - 3367.0 / 4281.0 * 100.0).abs() < 1e-12);
        assert!((improvement_pct(0.83, 0.76, Direction::Minimize) - 8.4).abs() < 0.05);
        assert!((improvement_pct(-7680.0, -7622.0, Direction::Minimize) + 0.8).abs() < 0.05);
        assert!((improvement_pct(0.631, 0.997, Direction::Maximize) - 58.0).abs() < 0.05);
        assert_eq!(improvement_pct(0.0, 15.0, Direction::Maximize), 100.0);
        assert_eq!(improvement_pct(0.76, 0.76, Direction::Minimize), 0.0);
        assert_eq!(improvement_pct(0.0, 0.0, Direction::Maximize), 0.0);
    }

    #[test]
    fn best_of_singleton_is_itself() {
        let d = DecisionVector::from_array([1, 5, 0, 0, 1, 1, 50, 0, 1, 0]);
        let o = ObjectiveTriple::new(3.0, 2.0, 5.0);
        let b = extract_best(&[(d, o)]).unwrap();
        assert_eq!((b.min_lcc.0, b.min_ghg.0, b.max_walkscore.0), (3.0, 2.0, 5.0));
        assert_eq!(extract_best(&[]), Err(MetricsError::Empty("best objectives")));
    }
}
