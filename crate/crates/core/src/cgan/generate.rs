use std::fmt;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::train::run_rng;
use super::{CganError, NormalizationSpec, LABEL_COUNT};
use crate::district::{DecisionVector, FIELD_COUNT};
use crate::nn::Mlp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RunKind {
    Short,
    Long,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Short => "short",
            RunKind::Long => "long",
        }
    }

    fn id(self) -> u64 {
        match self {
            RunKind::Short => 1,
            RunKind::Long => 2,
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One generator output with its conditioning label and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedCandidate {
    pub run: RunKind,
    pub iteration: usize,
    pub label_index: usize,
    pub label: [f64; LABEL_COUNT],
    /// Generator output before denormalization.
    pub raw: [f64; FIELD_COUNT],
    pub decision: DecisionVector,
}

/// Draws `count_per_label` samples for every label from a frozen generator.
///
/// Each (run, iteration, label) triple gets its own random stream derived
/// from `seed`, so results do not depend on how labels are batched.
pub fn generate(
    generator: &Mlp,
    labels: &[[f64; LABEL_COUNT]],
    count_per_label: usize,
    norm: &NormalizationSpec,
    run: RunKind,
    iteration: usize,
    seed: u64,
) -> Result<Vec<GeneratedCandidate>, CganError> {
    let latent = generator.input_width() - LABEL_COUNT;
    let mut out = Vec::with_capacity(labels.len() * count_per_label);
    if count_per_label == 0 {
        return Ok(out);
    }
    for (label_index, label) in labels.iter().enumerate() {
        let stream = (run.id() << 56) | ((iteration as u64) << 20) | label_index as u64;
        let mut rng = run_rng(seed, stream);
        let input = Array2::from_shape_fn((count_per_label, latent + LABEL_COUNT), |(_, j)| {
            if j < latent {
                rng.sample::<f64, _>(StandardNormal)
            } else {
                label[j - latent]
            }
        });
        let raw = generator.predict(&input)?;
        for row in raw.rows() {
            let mut r = [0.0; FIELD_COUNT];
            for (dst, &src) in r.iter_mut().zip(row.iter()) {
                *dst = src;
            }
            out.push(GeneratedCandidate {
                run,
                iteration,
                label_index,
                label: *label,
                raw: r,
                decision: norm.denormalize_features(&r),
            });
        }
    }
    Ok(out)
}

/// Concatenates the candidates of two runs, keeping duplicates.
pub fn combine_runs(short: Vec<GeneratedCandidate>, long: Vec<GeneratedCandidate>) -> Vec<GeneratedCandidate> {
    let mut pool = short;
    pool.extend(long);
    pool
}
