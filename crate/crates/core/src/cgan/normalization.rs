use serde::Serialize;

use super::LABEL_COUNT;
use crate::district::{DecisionVector, ObjectiveTriple, FIELD_COUNT, FIELD_RANGES, OBJECTIVE_NAMES};

/// Affine maps of features (by field range) and labels (by training-set
/// extent) onto [−1, 1].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizationSpec {
    pub feature_ranges: [(i32, i32); FIELD_COUNT],
    pub label_min: [f64; LABEL_COUNT],
    pub label_max: [f64; LABEL_COUNT],
    pub warnings: Vec<String>,
}

impl NormalizationSpec {
    /// Fits label extents on the training objectives. Panics on an empty set.
    pub fn fit(labels: &[ObjectiveTriple]) -> Self {
        assert!(!labels.is_empty(), "cannot fit normalization on an empty training set");
        let mut lo = [f64::INFINITY; LABEL_COUNT];
        let mut hi = [f64::NEG_INFINITY; LABEL_COUNT];
        for l in labels {
            for (k, v) in l.to_array().into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let warnings = (0..LABEL_COUNT)
            .filter(|&k| lo[k] == hi[k])
            .map(|k| {
                format!("label {} is constant ({}) in the training set; normalized to 0", OBJECTIVE_NAMES[k], lo[k])
            })
            .collect();
        Self { feature_ranges: FIELD_RANGES, label_min: lo, label_max: hi, warnings }
    }

    pub fn normalize_features(&self, d: &DecisionVector) -> [f64; FIELD_COUNT] {
        let v = d.to_array();
        let mut out = [0.0; FIELD_COUNT];
        for f in 0..FIELD_COUNT {
            let (lo, hi) = self.feature_ranges[f];
            out[f] = 2.0 * (v[f] - lo) as f64 / (hi - lo) as f64 - 1.0;
        }
        out
    }

    /// Maps a raw generator output back to an integer, rounding to nearest.
    /// Values outside [−1, 1] land outside the field range and are kept.
    pub fn denormalize_feature(&self, field: usize, raw: f64) -> i32 {
        let (lo, hi) = self.feature_ranges[field];
        (lo as f64 + (raw + 1.0) / 2.0 * (hi - lo) as f64).round() as i32
    }

    pub fn denormalize_features(&self, raw: &[f64]) -> DecisionVector {
        let mut v = [0i32; FIELD_COUNT];
        for f in 0..FIELD_COUNT {
            v[f] = self.denormalize_feature(f, raw[f]);
        }
        DecisionVector::from_array(v)
    }

    pub fn normalize_label(&self, o: &ObjectiveTriple) -> [f64; LABEL_COUNT] {
        let v = o.to_array();
        let mut out = [0.0; LABEL_COUNT];
        for k in 0..LABEL_COUNT {
            let (lo, hi) = (self.label_min[k], self.label_max[k]);
            out[k] = if hi == lo { 0.0 } else { 2.0 * (v[k] - lo) / (hi - lo) - 1.0 };
        }
        out
    }

    /// Natural-unit objectives targeted by a normalized label.
    pub fn denormalize_label(&self, label: &[f64; LABEL_COUNT]) -> ObjectiveTriple {
        let mut out = [0.0; LABEL_COUNT];
        for k in 0..LABEL_COUNT {
            let (lo, hi) = (self.label_min[k], self.label_max[k]);
            out[k] = lo + (label[k] + 1.0) / 2.0 * (hi - lo);
        }
        ObjectiveTriple::from_array(out)
    }
}
