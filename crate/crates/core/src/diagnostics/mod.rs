//! Measured quantities: weighted norms, vector-field norms, energies, fits and the
//! error-ODE bound.

mod fit;
mod norms;
mod record;
mod scattering;
mod vector_fields;

use thiserror::Error;

use crate::rsw::ModelError;

pub use fit::{error_ode_bound, fit_decay, linear_fit, ode_lifespan, FitError, FitResult, OdeBound, MIN_FIT_SAMPLES};
pub use norms::{support_radius, weighted_norm, weighted_norm_triple, NormKind, NormSpec};
pub use record::{record, DiagnosticsRecord, RecordOptions, SUPPORT_TOLERANCE};
pub use scattering::{scattering_diagnostic, ScatterRow};
pub use vector_fields::{
    energy_f, multi_indices, vf_apply, vf_norm, x_proxy, DiffOp, EnergyReport, JetCache, VectorFieldOp, VfTarget,
    MAX_VF_ORDER,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagError {
    #[error("vector-field order {0} is not supported (maximum {MAX_VF_ORDER})")]
    UnsupportedOrder(usize),
    #[error("time {time} is outside the trajectory [0, {last}]")]
    OutOfRange { time: f64, last: f64 },
    #[error("time {0} is not a checkpoint of the trajectory")]
    NotACheckpoint(f64),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
