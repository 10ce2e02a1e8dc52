//! SBX crossover and bounded polynomial mutation on the real relaxation of
//! the integer decision fields. Results are clamped to the field ranges and
//! rounded to the nearest integer.

use rand::Rng;

use crate::district::{DecisionVector, FIELD_COUNT, FIELD_RANGES};

fn clamp_round(x: f64, field: usize) -> i32 {
    let (lo, hi) = FIELD_RANGES[field];
    x.clamp(lo as f64, hi as f64).round() as i32
}

/// SBX spread factor for a uniform draw `u` in [0, 1).
fn spread(u: f64, eta: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    }
}

/// SBX with one uniform draw per field supplied by the caller.
pub fn sbx_crossover_with_draws(
    a: &DecisionVector,
    b: &DecisionVector,
    eta: f64,
    draws: &[f64; FIELD_COUNT],
) -> (DecisionVector, DecisionVector) {
    let (x1, x2) = (a.to_array(), b.to_array());
    let mut c1 = x1;
    let mut c2 = x2;
    for f in 0..FIELD_COUNT {
        let beta = spread(draws[f], eta);
        let (p1, p2) = (x1[f] as f64, x2[f] as f64);
        c1[f] = clamp_round(0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2), f);
        c2[f] = clamp_round(0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2), f);
    }
    (DecisionVector::from_array(c1), DecisionVector::from_array(c2))
}

pub fn sbx_crossover<R: Rng + ?Sized>(
    a: &DecisionVector,
    b: &DecisionVector,
    eta: f64,
    rng: &mut R,
) -> (DecisionVector, DecisionVector) {
    let mut draws = [0.0; FIELD_COUNT];
    for u in draws.iter_mut() {
        *u = rng.random::<f64>();
    }
    sbx_crossover_with_draws(a, b, eta, &draws)
}

/// Per-field randomness of polynomial mutation: whether the field mutates
/// and the draw that shapes the perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutationDraw {
    pub mutate: bool,
    pub u: f64,
}

/// Bounded polynomial mutation with caller-supplied draws.
pub fn polynomial_mutation_with_draws(
    d: &DecisionVector,
    eta: f64,
    draws: &[MutationDraw; FIELD_COUNT],
) -> DecisionVector {
    let mut x = d.to_array();
    for f in 0..FIELD_COUNT {
        if !draws[f].mutate {
            continue;
        }
        let (lo, hi) = (FIELD_RANGES[f].0 as f64, FIELD_RANGES[f].1 as f64);
        let v = (x[f] as f64).clamp(lo, hi);
        let width = hi - lo;
        let u = draws[f].u;
        let power = 1.0 / (eta + 1.0);
        let delta = if u < 0.5 {
            let xy = 1.0 - (v - lo) / width;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(power) - 1.0
        } else {
            let xy = 1.0 - (hi - v) / width;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(power)
        };
        x[f] = clamp_round(v + delta * width, f);
    }
    DecisionVector::from_array(x)
}

pub fn polynomial_mutation<R: Rng + ?Sized>(
    d: &DecisionVector,
    eta: f64,
    mutation_prob: f64,
    rng: &mut R,
) -> DecisionVector {
    let mut draws = [MutationDraw { mutate: false, u: 0.5 }; FIELD_COUNT];
    for draw in draws.iter_mut() {
        draw.mutate = rng.random::<f64>() < mutation_prob;
        if draw.mutate {
            draw.u = rng.random::<f64>();
        }
    }
    polynomial_mutation_with_draws(d, eta, &draws)
}
