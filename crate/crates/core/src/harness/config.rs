use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::cgan::{CganConfig, Experiment};
use crate::moo::GaConfig;

/// Pool sizes before scaling, per experiment in [`Experiment::ALL`] order.
pub const FULL_POOL_TARGETS: [usize; 6] = [875, 875, 875, 2750, 5000, 4000];

/// Short-run iteration counts by experiment kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortRuns {
    pub single_objective: usize,
    pub all_objective: usize,
}

/// Everything that determines an experiment's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    /// Master seed; the GA and every GAN run derive their streams from it.
    pub seed: u64,
    pub ga: GaConfig,
    pub cgan: CganConfig,
    pub short_run_iterations: ShortRuns,
    pub long_run_epochs: usize,
    /// Upper bound on long-run iterations, if any.
    pub long_run_max_iterations: Option<usize>,
    /// Multiplier applied to the generated-pool targets.
    pub pool_scale: f64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl HarnessConfig {
    /// Small settings that run end to end in seconds.
    pub fn desk() -> Self {
        Self {
            seed: 0,
            ga: GaConfig::desk(),
            cgan: CganConfig::default(),
            short_run_iterations: ShortRuns { single_objective: 300, all_objective: 300 },
            long_run_epochs: 10,
            long_run_max_iterations: None,
            pool_scale: 0.1,
        }
    }

    /// 128 × 512 GA, 800/2000-iteration short runs, 155-epoch long runs,
    /// full pool sizes.
    pub fn full_scale() -> Self {
        Self {
            seed: 0,
            ga: GaConfig::default(),
            cgan: CganConfig::default(),
            short_run_iterations: ShortRuns { single_objective: 800, all_objective: 2000 },
            long_run_epochs: 155,
            long_run_max_iterations: None,
            pool_scale: 1.0,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.ga.validate()?;
        self.cgan.validate()?;
        if !(self.pool_scale > 0.0 && self.pool_scale.is_finite()) {
            return Err(HarnessError::Config(format!("pool_scale {} must be positive", self.pool_scale)));
        }
        Ok(())
    }

    /// The GA settings with the master seed applied.
    pub fn ga_config(&self) -> GaConfig {
        GaConfig { rng_seed: self.seed, ..self.ga.clone() }
    }

    pub fn short_iterations(&self, e: Experiment) -> usize {
        if e.is_single_objective() {
            self.short_run_iterations.single_objective
        } else {
            self.short_run_iterations.all_objective
        }
    }

    pub fn long_iterations(&self, rows: usize) -> usize {
        let it = crate::cgan::epochs_to_iterations(rows, self.cgan.batch_size, self.long_run_epochs);
        self.long_run_max_iterations.map_or(it, |cap| it.min(cap))
    }

    /// Generated-pool target for an experiment.
    pub fn pool_target(&self, e: Experiment) -> usize {
        let i = Experiment::ALL.iter().position(|&x| x == e).expect("known experiment");
        ((FULL_POOL_TARGETS[i] as f64 * self.pool_scale).round() as usize).max(1)
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}
