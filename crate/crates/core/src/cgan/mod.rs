//! Conditional GAN over the solution archive.
//!
//! The generator maps `noise ‖ label` to ten normalized decision fields; the
//! discriminator scores `features ‖ label`. Labels are the three objectives
//! (LCC, GHG, WalkScore), each mapped affinely so that the training set spans
//! [−1, 1].

mod generate;
mod labels;
mod normalization;
mod selection;
mod train;

pub use generate::{combine_runs, generate, GeneratedCandidate, RunKind};
pub use labels::{build_label_grid, Experiment, LabelGrid, LabelRange, GRID_POINTS};
pub use normalization::NormalizationSpec;
pub use selection::select_candidate_snapshots;
pub use train::{
    epochs_to_iterations, run_rng, train, IterationStats, PassCounts, TrainingData, TrainingRun, TrainingSnapshot,
};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::district::FIELD_COUNT;
use crate::nn::{Activation, AdamConfig, Layer, Mlp, NnError};

/// Number of label components.
pub const LABEL_COUNT: usize = 3;

#[derive(Debug, Error)]
pub enum CganError {
    #[error("training needs at least {batch} rows, got {rows}")]
    NotEnoughRows { rows: usize, batch: usize },
    #[error("non-finite loss at iteration {iteration}: d_loss {d_loss}, g_loss {g_loss}")]
    NonFinite { iteration: usize, d_loss: f64, g_loss: f64 },
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("invalid GAN configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Nn(#[from] NnError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CganConfig {
    pub latent_dim: usize,
    pub generator_hidden: Vec<usize>,
    pub discriminator_hidden: Vec<usize>,
    pub batch_size: usize,
    pub snapshot_interval: usize,
    pub leaky_alpha: f64,
    pub dropout: f64,
    pub bn_momentum: f64,
    pub bn_epsilon: f64,
    pub adam: AdamConfig,
}

impl Default for CganConfig {
    fn default() -> Self {
        Self {
            latent_dim: 3,
            generator_hidden: vec![64, 128, 64],
            discriminator_hidden: vec![128, 64, 32],
            batch_size: 64,
            snapshot_interval: 100,
            leaky_alpha: 0.2,
            dropout: 0.4,
            bn_momentum: 0.8,
            bn_epsilon: 1e-3,
            adam: AdamConfig::default(),
        }
    }
}

impl CganConfig {
    pub fn validate(&self) -> Result<(), CganError> {
        let bad = |m: &str| Err(CganError::InvalidConfig(m.to_string()));
        if self.latent_dim == 0 || self.batch_size == 0 || self.snapshot_interval == 0 {
            return bad("latent_dim, batch_size and snapshot_interval must be positive");
        }
        if self.generator_hidden.contains(&0) || self.discriminator_hidden.contains(&0) {
            return bad("hidden widths must be positive");
        }
        if self.adam.learning_rate.is_nan()
            || self.adam.learning_rate <= 0.0
            || !(0.0..1.0).contains(&self.adam.beta1)
            || !(0.0..1.0).contains(&self.adam.beta2)
        {
            return bad("adam needs lr > 0 and betas in [0, 1)");
        }
        Ok(())
    }

    /// `noise ‖ label` → hidden blocks of dense, leaky ReLU, batch norm → tanh
    /// over the ten decision fields.
    pub fn build_generator<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Mlp, CganError> {
        let input = self.latent_dim + LABEL_COUNT;
        let mut layers = Vec::new();
        let mut width = input;
        for &h in &self.generator_hidden {
            layers.push(Layer::dense(width, h, rng));
            layers.push(Layer::Activation(Activation::LeakyRelu(self.leaky_alpha)));
            layers.push(Layer::batch_norm(h, self.bn_momentum, self.bn_epsilon));
            width = h;
        }
        layers.push(Layer::dense(width, FIELD_COUNT, rng));
        layers.push(Layer::Activation(Activation::Tanh));
        Ok(Mlp::new(input, layers)?)
    }

    /// `features ‖ label` → hidden blocks of dense, batch norm, leaky ReLU,
    /// dropout → sigmoid probability of being real.
    pub fn build_discriminator<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Mlp, CganError> {
        let input = FIELD_COUNT + LABEL_COUNT;
        let mut layers = Vec::new();
        let mut width = input;
        for &h in &self.discriminator_hidden {
            layers.push(Layer::dense(width, h, rng));
            layers.push(Layer::batch_norm(h, self.bn_momentum, self.bn_epsilon));
            layers.push(Layer::Activation(Activation::LeakyRelu(self.leaky_alpha)));
            layers.push(Layer::Dropout { prob: self.dropout });
            width = h;
        }
        layers.push(Layer::dense(width, 1, rng));
        layers.push(Layer::Activation(Activation::Sigmoid));
        Ok(Mlp::new(input, layers)?)
    }
}
