//! End-to-end experiments: archive → training subset → two GAN runs →
//! snapshot selection → label-grid generation → vetting → metrics, with every
//! intermediate persisted as CSV under one output directory.
//!
//! Layout of an output directory:
//!
//! ```text
//! archive.csv  ga_timing.csv  ga_progress.csv  report.csv
//! <Experiment>/
//!     training_set.csv  medians.csv  normalization.csv  label_grid.csv
//!     short/ long/      history.csv  snapshots.csv  timing.csv
//!                       generator_<it>.txt (per snapshot)  discriminator_<last>.txt
//!     candidates.csv  vetted.csv  report.csv  report.json  timings.csv  warnings.txt  status.txt
//!     plots/
//! ```

mod config;
mod filter;
mod io;
mod pipeline;
mod plots;
mod report;
mod vet;

pub use config::{HarnessConfig, ShortRuns, FULL_POOL_TARGETS};
pub use filter::{filter_training_set, median, Medians};
pub use io::{read_objective_rows, write_objective_rows};
pub use pipeline::{
    count_per_label, generate_stage, load_archive, load_trained, optimize, run_experiment, train_stage, write_summary,
    GaRun, Harness, TrainedExperiment, TrainedRun,
};
pub use plots::{emit_plots, running_average, PlotData, PLOT_LCC_LIMIT, RUNNING_WINDOW};
pub use report::{report_runtime_ratio, Cell, RejectionCounts, ReportRow, RunReport, RunSummary, Timings};
pub use vet::{vet_candidates, Rejection, VetOutcome, VettedSolution};

use std::path::Path;

use thiserror::Error;

use crate::cgan::CganError;
use crate::metrics::MetricsError;
use crate::moo::{ArchiveError, MooError};
use crate::nn::NnError;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Wraps a failure with the stage it happened in; displays the inner error.
    #[error("{error}")]
    Stage { stage: &'static str, error: Box<HarnessError> },
    #[error("archive has {0} feasible solutions; at least 2 are needed")]
    TooFewFeasible(usize),
    #[error("{experiment} selects no training rows; try FullData or a larger archive")]
    EmptyTrainingSet { experiment: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error(transparent)]
    Moo(#[from] MooError),
    #[error(transparent)]
    Cgan(#[from] CganError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }

    /// Name of the stage that failed, if known.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            HarnessError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T, HarnessError>;
}

impl<T, E: Into<HarnessError>> StageExt<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, HarnessError> {
        self.map_err(|e| match e.into() {
            inner @ HarnessError::Stage { .. } => inner,
            inner => HarnessError::Stage { stage, error: Box::new(inner) },
        })
    }
}
