//! Experiment drivers for the rotating shallow water laboratory: configuration,
//! the `simulate`, `decay`, `lifespan` and `scatter` pipelines, and file output.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

use rsw_core::diagnostics::{DiagError, FitError};
use rsw_core::integrate::IntegrateError;
use rsw_core::rsw::ModelError;

pub use commands::{
    decay::{cmd_decay, decay_analysis, DecayReport},
    lifespan::{cmd_lifespan, LifespanRow, SweepResult},
    scatter::{cmd_scatter, scatter_analysis, ScatterReport},
    simulate::{auto_window, cmd_simulate, run_simulation, SimulationRun},
    RunOptions,
};
pub use config::{load_config, ExperimentConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("fit window: {0}")]
    Window(String),
    #[error("sweep: {0}")]
    Sweep(String),
    #[error("fit: {0}")]
    Fit(#[from] FitError),
    #[error(transparent)]
    Diagnostics(#[from] DiagError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentError::Config(_) => "config",
            ExperimentError::Window(_) => "window",
            ExperimentError::Sweep(_) => "sweep",
            ExperimentError::Fit(_) => "fit",
            ExperimentError::Diagnostics(_) => "diagnostics",
            ExperimentError::Integrate(_) => "integrate",
            ExperimentError::Model(_) => "model",
            ExperimentError::Io { .. } => "io",
        }
    }
}
