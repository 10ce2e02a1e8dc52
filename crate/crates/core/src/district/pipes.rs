//! Hot-water pipe selection on the plant-to-building star network.

use serde::Serialize;
use thiserror::Error;

use super::{validate, Catalog, DecisionVector, GridGeometry, PipeType, Violation};

#[derive(Debug, Error, PartialEq)]
pub enum PipeNetworkError {
    #[error("pipe network needs a feasible design: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InfeasibleDesign(Vec<Violation>),
}

/// One plant-to-building connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipeEdge {
    pub building_node: usize,
    pub length_m: f64,
    /// Zero-based index into the catalog's pipe list.
    pub pipe: usize,
    pub capital_cost: f64,
    pub loss_cost: f64,
}

/// Cost-minimal pipe assignment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipeNetwork {
    pub edges: Vec<PipeEdge>,
    pub capital_cost: f64,
    pub loss_cost: f64,
}

impl PipeNetwork {
    /// Network life-cycle cost: construction plus heat-loss penalty.
    pub fn total_cost(&self) -> f64 {
        self.capital_cost + self.loss_cost
    }

    pub fn assignment(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.pipe).collect()
    }

    /// Continuous heat loss of the network at a supply-to-ground difference, W.
    pub fn heat_loss_w(&self, catalog: &Catalog, delta_t: f64) -> f64 {
        self.edges.iter().map(|e| catalog.pipe[e.pipe].loss_coefficient * e.length_m * delta_t).sum()
    }
}

/// `(capital, heat-loss penalty)` of one edge.
pub(crate) fn edge_cost(pipe: &PipeType, length_m: f64, delta_t: f64, price_factor: f64) -> (f64, f64) {
    let capital = pipe.unit_cost * length_m;
    let loss = pipe.loss_coefficient * length_m * delta_t * price_factor;
    (capital, loss)
}

/// Exhaustively enumerates every pipe assignment (at most 5³) and keeps the
/// cheapest; ties go to the lexicographically smallest assignment.
pub(crate) fn solve(
    d: &DecisionVector,
    geom: &GridGeometry,
    catalog: &Catalog,
    supply_temp_c: f64,
) -> Result<PipeNetwork, PipeNetworkError> {
    let verdict = validate(d);
    if !verdict.is_feasible() {
        return Err(PipeNetworkError::InfeasibleDesign(verdict.violations().to_vec()));
    }
    let plant = d.plant_node().expect("feasible design has one plant");
    let delta_t = supply_temp_c - catalog.site.ground_temp_c;
    let price_factor = catalog.heat_loss_price_factor();

    let links: Vec<(usize, f64)> = d.buildings().map(|(node, _)| (node, geom.distance(plant, node))).collect();
    // cost table per edge and pipe type
    let table: Vec<Vec<(f64, f64)>> = links
        .iter()
        .map(|&(_, len)| catalog.pipe.iter().map(|p| edge_cost(p, len, delta_t, price_factor)).collect())
        .collect();

    let options = catalog.pipe.len();
    let k = links.len();
    let mut digits = vec![0usize; k];
    let mut best: Option<(f64, Vec<usize>)> = None;
    for code in 0..options.pow(k as u32) {
        // first edge is the most significant digit, so codes run in lexicographic order
        let mut rest = code;
        for slot in digits.iter_mut().rev() {
            *slot = rest % options;
            rest /= options;
        }
        let total: f64 = digits.iter().enumerate().map(|(e, &p)| table[e][p].0 + table[e][p].1).sum();
        if best.as_ref().is_none_or(|(c, _)| total < *c) {
            best = Some((total, digits.clone()));
        }
    }

    let (_, chosen) = best.expect("at least one assignment");
    let edges: Vec<PipeEdge> = links
        .iter()
        .zip(&chosen)
        .enumerate()
        .map(|(e, (&(node, len), &p))| PipeEdge {
            building_node: node,
            length_m: len,
            pipe: p,
            capital_cost: table[e][p].0,
            loss_cost: table[e][p].1,
        })
        .collect();
    Ok(PipeNetwork {
        capital_cost: edges.iter().map(|e| e.capital_cost).sum(),
        loss_cost: edges.iter().map(|e| e.loss_cost).sum(),
        edges,
    })
}
