//! Pseudospectral laboratory for the inviscid rotating shallow water system.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`]: periodic grids, FFT-backed fields, Fourier multipliers and dealiasing.
//! * [`rsw`]: primitive, symmetrized and Klein-Gordon formulations, relative vorticity,
//!   the zero-relative-vorticity projection and initial data.
//! * [`integrate`]: RK4 stepping, exact linear propagators and trajectories.
//! * [`diagnostics`]: weighted Sobolev norms, vector-field norms, energies, decay fits,
//!   scattering comparison and the error-ODE bound.

pub mod diagnostics;
pub mod integrate;
pub mod rsw;
pub mod spectral;

#[cfg(test)]
pub(crate) mod test_util;
