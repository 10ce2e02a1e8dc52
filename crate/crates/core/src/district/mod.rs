//! District energy design problem: decision encoding, constraints and the
//! synthetic reference model that maps a design to (LCC, GHG, WalkScore).

mod catalog;
mod model;
mod pipes;

pub use catalog::{
    BuildingType, Catalog, CatalogError, ChillerType, ChpType, ClimateParams, PipeType, Prices, SiteParams,
};
pub use model::{Evaluation, ReferenceModel};
pub use pipes::{PipeEdge, PipeNetwork, PipeNetworkError};

use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of grid nodes in the district.
pub const NODE_COUNT: usize = 4;
/// Number of integer fields in a [`DecisionVector`].
pub const FIELD_COUNT: usize = 10;
/// Node value marking the central plant.
pub const PLANT: i32 = 5;
/// Node value marking an empty node.
pub const EMPTY: i32 = 0;

/// Inclusive range of every decision field, in [`DecisionVector::to_array`] order.
pub const FIELD_RANGES: [(i32, i32); FIELD_COUNT] =
    [(0, 5), (0, 5), (0, 5), (0, 5), (1, 6), (1, 3), (50, 95), (0, 10), (1, 8), (0, 3)];

pub const FIELD_NAMES: [&str; FIELD_COUNT] = [
    "node_0",
    "node_1",
    "node_2",
    "node_3",
    "chp_type",
    "chiller_type",
    "hot_water_temp",
    "hot_water_summer_reset",
    "cold_water_temp",
    "cold_water_winter_reset",
];

/// Ten-integer design of a district.
///
/// Field values are not range-checked on construction: the GAN can emit
/// anything and [`validate`] decides admissibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecisionVector {
    /// 0 = empty, 1..=4 = building type, 5 = central plant.
    pub node_use: [i32; NODE_COUNT],
    pub chp_type: i32,
    pub chiller_type: i32,
    /// Hot-water supply temperature, °C.
    pub hot_water_temp: i32,
    /// Summer reduction of the hot-water supply temperature, °C.
    pub hot_water_summer_reset: i32,
    /// Chilled-water supply temperature, °C.
    pub cold_water_temp: i32,
    /// Winter increase of the chilled-water supply temperature, °C.
    pub cold_water_winter_reset: i32,
}

impl DecisionVector {
    pub fn from_array(v: [i32; FIELD_COUNT]) -> Self {
        Self {
            node_use: [v[0], v[1], v[2], v[3]],
            chp_type: v[4],
            chiller_type: v[5],
            hot_water_temp: v[6],
            hot_water_summer_reset: v[7],
            cold_water_temp: v[8],
            cold_water_winter_reset: v[9],
        }
    }

    pub fn to_array(&self) -> [i32; FIELD_COUNT] {
        let n = self.node_use;
        [
            n[0],
            n[1],
            n[2],
            n[3],
            self.chp_type,
            self.chiller_type,
            self.hot_water_temp,
            self.hot_water_summer_reset,
            self.cold_water_temp,
            self.cold_water_winter_reset,
        ]
    }

    /// Index of the plant node when exactly one node carries the plant.
    pub fn plant_node(&self) -> Option<usize> {
        let mut plants = self.node_use.iter().enumerate().filter(|(_, &u)| u == PLANT);
        match (plants.next(), plants.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    /// `(node index, building type)` for every node holding a building.
    pub fn buildings(&self) -> impl Iterator<Item = (usize, i32)> + '_ {
        self.node_use.iter().copied().enumerate().filter(|&(_, u)| (1..=4).contains(&u))
    }

    pub fn building_count(&self) -> usize {
        self.buildings().count()
    }
}

impl fmt::Display for DecisionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_array();
        write!(f, "(")?;
        for (i, x) in v.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Optimization sense of an objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// +1 for maximization, -1 for minimization.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Minimize => -1.0,
            Direction::Maximize => 1.0,
        }
    }
}

/// Objective names in label order (LCC, GHG, WalkScore).
pub const OBJECTIVE_NAMES: [&str; 3] = ["lcc", "ghg", "walkscore"];
pub const OBJECTIVE_DIRECTIONS: [Direction; 3] = [Direction::Minimize, Direction::Minimize, Direction::Maximize];
pub const MAX_WALKSCORE: f64 = 15.0;

/// Life-cycle cost ($/m²), life-cycle emissions (t CO2-eq/m²) and WalkScore.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTriple {
    pub lcc: f64,
    pub ghg: f64,
    pub walkscore: f64,
}

impl ObjectiveTriple {
    pub fn new(lcc: f64, ghg: f64, walkscore: f64) -> Self {
        Self { lcc, ghg, walkscore }
    }

    /// Values in label order (LCC, GHG, WalkScore).
    pub fn to_array(&self) -> [f64; 3] {
        [self.lcc, self.ghg, self.walkscore]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// All-minimized form used by dominance checks: (LCC, GHG, -WalkScore).
    pub fn minimization_form(&self) -> [f64; 3] {
        [self.lcc, self.ghg, -self.walkscore]
    }
}

/// A violated constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoBuilding,
    TooManyBuildings(usize),
    PlantCount(usize),
    OutOfRange { field: &'static str, value: i32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoBuilding => write!(f, "at least one node must be occupied by a building"),
            Violation::TooManyBuildings(n) => {
                write!(f, "at most three nodes may hold buildings (found {n})")
            }
            Violation::PlantCount(n) => {
                write!(f, "exactly one node must hold the central plant (found {n})")
            }
            Violation::OutOfRange { field, value } => {
                write!(f, "{field} = {value} is outside its range")
            }
        }
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible(Vec<Violation>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            Feasibility::Feasible => &[],
            Feasibility::Infeasible(v) => v,
        }
    }
}

/// Checks the three constraint groups: building count, plant placement and
/// field ranges.
pub fn validate(d: &DecisionVector) -> Feasibility {
    let mut violations = Vec::new();
    for (i, (&value, &(lo, hi))) in d.to_array().iter().zip(FIELD_RANGES.iter()).enumerate() {
        if value < lo || value > hi {
            violations.push(Violation::OutOfRange { field: FIELD_NAMES[i], value });
        }
    }
    let buildings = d.building_count();
    if buildings == 0 {
        violations.push(Violation::NoBuilding);
    } else if buildings > 3 {
        violations.push(Violation::TooManyBuildings(buildings));
    }
    let plants = d.node_use.iter().filter(|&&u| u == PLANT).count();
    if plants != 1 {
        violations.push(Violation::PlantCount(plants));
    }
    if violations.is_empty() {
        Feasibility::Feasible
    } else {
        Feasibility::Infeasible(violations)
    }
}

/// True iff `archive` holds an entry with the identical ten integers.
pub fn is_duplicate(d: &DecisionVector, archive: &[DecisionVector]) -> bool {
    archive.iter().any(|a| a == d)
}

/// WalkScore of a mix: 15 × (distinct building types − 1) / 3, clamped to [0, 15].
pub fn walkscore(d: &DecisionVector) -> f64 {
    let mut seen = [false; 5];
    for (_, t) in d.buildings() {
        seen[t as usize] = true;
    }
    let distinct = seen.iter().filter(|&&s| s).count() as f64;
    (MAX_WALKSCORE * (distinct - 1.0) / 3.0).clamp(0.0, MAX_WALKSCORE)
}

/// Fixed node coordinates of the four-node grid, in meters.
#[derive(Clone, Debug, PartialEq)]
pub struct GridGeometry {
    node_coords: [(f64, f64); NODE_COUNT],
}

impl GridGeometry {
    pub fn standard() -> Self {
        Self { node_coords: [(0.0, 0.0), (0.0, 100.0), (100.0, 0.0), (200.0, 100.0)] }
    }

    pub fn node_coords(&self) -> &[(f64, f64); NODE_COUNT] {
        &self.node_coords
    }

    /// Euclidean distance between two nodes.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (xa, ya) = self.node_coords[a];
        let (xb, yb) = self.node_coords[b];
        (xa - xb).hypot(ya - yb)
    }
}

impl Default for GridGeometry {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(nodes: [i32; 4]) -> DecisionVector {
        DecisionVector {
            node_use: nodes,
            chp_type: 3,
            chiller_type: 2,
            hot_water_temp: 70,
            hot_water_summer_reset: 5,
            cold_water_temp: 5,
            cold_water_winter_reset: 1,
        }
    }

    #[test]
    fn minimal_design_is_feasible() {
        assert_eq!(validate(&design([1, 5, 0, 0])), Feasibility::Feasible);
    }

    #[test]
    fn empty_district_is_infeasible() {
        let verdict = validate(&design([0, 5, 0, 0]));
        assert_eq!(verdict.violations(), &[Violation::NoBuilding]);
        assert_eq!(verdict.violations()[0].to_string(), "at least one node must be occupied by a building");
    }

    #[test]
    fn missing_plant_is_infeasible() {
        let verdict = validate(&design([1, 2, 3, 4]));
        assert!(verdict.violations().contains(&Violation::PlantCount(0)));
        assert!(verdict.violations().contains(&Violation::TooManyBuildings(4)));
    }

    #[test]
    fn two_plants_are_infeasible() {
        let verdict = validate(&design([5, 5, 1, 0]));
        assert_eq!(verdict.violations(), &[Violation::PlantCount(2)]);
    }

    #[test]
    fn out_of_range_fields_are_reported() {
        let mut d = design([1, 5, 0, 0]);
        d.hot_water_temp = 96;
        d.chp_type = 0;
        let verdict = validate(&d);
        assert_eq!(verdict.violations().len(), 2);
        let mut d = design([1, 5, 0, 0]);
        d.node_use[2] = 6;
        assert!(!validate(&d).is_feasible());
    }

    #[test]
    fn array_round_trip() {
        let d = design([2, 0, 5, 4]);
        assert_eq!(DecisionVector::from_array(d.to_array()), d);
        assert_eq!(d.to_string(), "(2,0,5,4,3,2,70,5,5,1)");
    }

    #[test]
    fn duplicate_detection() {
        let d = design([1, 5, 0, 0]);
        assert!(is_duplicate(&d, &[design([2, 5, 0, 0]), d]));
        let mut other = d;
        other.cold_water_winter_reset = 2;
        assert!(!is_duplicate(&other, &[d]));
        assert!(!is_duplicate(&d, &[]));
    }

    #[test]
    fn walkscore_steps() {
        assert_eq!(walkscore(&design([1, 5, 1, 1])), 0.0);
        assert_eq!(walkscore(&design([1, 5, 2, 0])), 5.0);
        assert_eq!(walkscore(&design([1, 5, 2, 3])), 10.0);
        assert_eq!(walkscore(&design([4, 5, 2, 3])), 10.0);
    }

    #[test]
    fn grid_distances() {
        let g = GridGeometry::standard();
        assert_eq!(g.distance(0, 1), 100.0);
        assert_eq!(g.distance(0, 2), 100.0);
        assert!((g.distance(0, 3) - 223.606_797_749_979).abs() < 1e-9);
        assert!((g.distance(1, 2) - 141.421_356_237_309_5).abs() < 1e-9);
    }
}
