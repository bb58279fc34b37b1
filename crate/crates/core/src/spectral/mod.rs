//! Periodic-box Fourier infrastructure.

mod fft;
mod field;
mod grid;
mod ops;

use thiserror::Error;

pub use field::{Representation, ScalarField, VectorField};
pub use grid::{make_grid, Grid, GridSpec};
pub use ops::{curl, dealias, div, fourier_multiplier, grad, laplacian, perp, pointwise_product};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("symbol is not finite at k = ({k1}, {k2})")]
    SingularSymbol { k1: f64, k2: f64 },
}
