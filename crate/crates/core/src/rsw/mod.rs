//! The rotating shallow water system in primitive, symmetrized and Klein–Gordon form.

mod kg;
mod rhs;
mod state;
mod vorticity;

use thiserror::Error;

use crate::spectral::{ScalarField, SpectralError};

pub use kg::{
    apply_matrix, assemble_coefficients, kg_quadratic_remainder, kg_residual, linear_kg_residual,
    matrix_sup_norm, CoefficientMatrices, MatrixField,
};
pub use rhs::{
    advection, linear_operator, primitive_rhs, symmetrized_rhs, symmetrized_tendency, time_derivatives,
};
pub use state::{Dynamics, FieldTriple, KGState, PrimitiveState, SymState};
pub use vorticity::{geostrophic_state, make_initial_data, project_zero_rv, relative_vorticity, Profile};
#[allow(unused_imports)]
pub(crate) use vorticity::triple_sobolev_norm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("vacuum: minimum depth 1 + rho = {min_depth}")]
    Vacuum { min_depth: f64 },
    #[error("invalid initial data: {0}")]
    InvalidData(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `m = 2(√(1+ρ) − 1)`, evaluated as `2ρ/(√(1+ρ) + 1)` to avoid cancellation.
pub fn rho_to_m(rho: &ScalarField) -> Result<ScalarField, ModelError> {
    let min_depth = 1.0 + rho.min();
    if !(min_depth > 0.0) {
        return Err(ModelError::Vacuum { min_depth });
    }
    Ok(rho.map_physical(|r| 2.0 * r / ((1.0 + r).sqrt() + 1.0)))
}

/// `ρ = m + m²/4`.
pub fn m_to_rho(m: &ScalarField) -> ScalarField {
    m.map_physical(|v| v + 0.25 * v * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use proptest::prelude::*;

    #[test]
    fn symmetrizer_values() {
        let g = make_grid(8, 1.0, 2.0 / 3.0).unwrap();
        assert_eq!(rho_to_m(&ScalarField::zeros(&g)).unwrap().max_abs(), 0.0);
        let m = rho_to_m(&ScalarField::constant(&g, 3.0)).unwrap();
        assert!((&m - &ScalarField::constant(&g, 2.0)).max_abs() < 1e-15);
        assert!(matches!(rho_to_m(&ScalarField::constant(&g, -1.0)), Err(ModelError::Vacuum { .. })));
    }

    proptest! {
        #[test]
        fn symmetrizer_round_trip(values in prop::collection::vec(-0.5f64..0.5, 64)) {
            let g = make_grid(8, 1.0, 2.0 / 3.0).unwrap();
            let rho = ScalarField::from_physical(&g, ndarray::Array2::from_shape_vec((8, 8), values).unwrap());
            let m = rho_to_m(&rho).unwrap();
            prop_assert!(m.min() > -2.0);
            prop_assert!((&m_to_rho(&m) - &rho).max_abs() <= 1e-12);
        }
    }
}
