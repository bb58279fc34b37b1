//! The four experiment pipelines.

pub mod decay;
pub mod lifespan;
pub mod scatter;
pub mod simulate;

use rsw_core::integrate::Termination;
use rsw_core::rsw::Dynamics;
use serde::Serialize;

/// Command-line switches shared by all pipelines.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Drop the quadratic terms from the dynamics.
    pub linear_only: bool,
}

impl RunOptions {
    pub fn dynamics(&self) -> Dynamics {
        if self.linear_only {
            Dynamics::Linear
        } else {
            Dynamics::Nonlinear
        }
    }
}

/// Keys common to every JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryHeader {
    pub command: &'static str,
    pub termination: Termination,
    pub t_final: f64,
    pub dynamics: Dynamics,
    pub config_hash: String,
    pub runtime_seconds: f64,
}
