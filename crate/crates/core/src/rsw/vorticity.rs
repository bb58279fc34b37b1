use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{curl, perp, Grid, ScalarField, VectorField};

use super::{FieldTriple, ModelError, PrimitiveState};

/// `θ = ∇×u − ρ`.
pub fn relative_vorticity(s: &PrimitiveState) -> ScalarField {
    &curl(&s.u).expect("state components share a grid") - &s.rho
}

/// Splits a state into a zero-relative-vorticity part and its complement.
///
/// With `d = (Δ − 1)^{-1} θ` the complement is `(d, ∇⊥d)`, `∇⊥d = (−∂2d, ∂1d)`, whose
/// relative vorticity is `(Δ − 1)d = θ`. Returns `(K, E)` with `K + E = s`.
pub fn project_zero_rv(s: &PrimitiveState) -> (PrimitiveState, PrimitiveState) {
    let d = relative_vorticity(s).inverse_helmholtz();
    let e = PrimitiveState {
        u: perp(&d.grad()),
        rho: d,
        time: s.time,
    };
    let k = PrimitiveState {
        rho: &s.rho - &e.rho,
        u: &s.u - &e.u,
        time: s.time,
    };
    (k, e)
}

/// Geostrophically balanced state `ρ = aψ`, `u = a∇⊥ψ`.
///
/// It is a steady state of the linearized system with `θ = a(Δψ − ψ)`.
pub fn geostrophic_state(psi: &ScalarField, amplitude: f64) -> Result<PrimitiveState, ModelError> {
    let rho = psi.scale(amplitude);
    let s = PrimitiveState {
        u: perp(&rho.grad()),
        rho,
        time: 0.0,
    };
    s.check_admissible()?;
    Ok(s)
}

/// Shape of generated initial data: an isotropic Gaussian `exp(−|x − x₀|²/w²)` at the box center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub width: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Self { width: 2.0 }
    }
}

impl Profile {
    /// Samples the envelope on the grid and dealiases it.
    pub fn sample(&self, grid: &Grid) -> ScalarField {
        let x = grid.centered_coords();
        let w2 = self.width * self.width;
        let n = grid.n();
        let values = ndarray::Array2::from_shape_fn((n, n), |(i, j)| (-(x[i] * x[i] + x[j] * x[j]) / w2).exp());
        ScalarField::from_physical(grid, values).dealias()
    }
}

/// `(Σ_p ‖T_p‖²_{H^l})^{1/2}`.
pub(crate) fn triple_sobolev_norm(t: &FieldTriple, l: f64) -> f64 {
    t.iter().map(|f| f.sobolev_norm(l).powi(2)).sum::<f64>().sqrt()
}

/// Initial data whose zero-relative-vorticity part has `H³` size `delta` and whose
/// relative vorticity has `H²` size `epsilon`.
///
/// The first part is the projection of a Gaussian envelope times seeded random
/// amplitudes in each of `(ρ, u1, u2)`. The second part is geostrophic, so it has no
/// zero-relative-vorticity component. Both sizes are measured on the grid and rescaled.
pub fn make_initial_data(
    grid: &Grid,
    delta: f64,
    epsilon: f64,
    profile: &Profile,
    seed: u64,
) -> Result<PrimitiveState, ModelError> {
    if !(delta >= 0.0 && epsilon >= 0.0) {
        return Err(ModelError::InvalidData(format!(
            "delta and epsilon must be nonnegative, got {delta}, {epsilon}"
        )));
    }
    if !(profile.width > 0.0) {
        return Err(ModelError::InvalidData(format!("profile width must be positive, got {}", profile.width)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let envelope = profile.sample(grid);

    let mut state = PrimitiveState::zeros(grid);
    if delta > 0.0 {
        let raw = PrimitiveState {
            rho: envelope.scale(coeffs[0]),
            u: VectorField {
                u1: envelope.scale(coeffs[1]),
                u2: envelope.scale(coeffs[2]),
            },
            time: 0.0,
        };
        let (k, _) = project_zero_rv(&raw);
        let norm = triple_sobolev_norm(&k.to_triple(), 3.0);
        state = PrimitiveState::from_triple(k.to_triple().scale(delta / norm), 0.0);
    }
    if epsilon > 0.0 {
        let psi = envelope.scale(sign);
        let unit = PrimitiveState {
            u: perp(&psi.grad()),
            rho: psi.clone(),
            time: 0.0,
        };
        let theta = relative_vorticity(&unit).sobolev_norm(2.0);
        let geo = geostrophic_state(&psi, epsilon / theta)?.to_triple();
        state = PrimitiveState::from_triple(&state.to_triple() + &geo, 0.0);
    }
    state.check_admissible()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use crate::test_util::{gaussian, random_smooth};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        make_grid(64, 8.0 * PI, 2.0 / 3.0).unwrap()
    }

    #[test]
    fn vorticity_of_rotational_flow() {
        let g = grid();
        let psi = gaussian(&g, 2.0);
        let s = PrimitiveState::new(ScalarField::zeros(&g), perp(&psi.grad()), 0.0).unwrap();
        assert!((&relative_vorticity(&s) - &psi.laplacian()).max_abs() < 1e-14);
        assert_eq!(relative_vorticity(&PrimitiveState::zeros(&g)).max_abs(), 0.0);
    }

    #[test]
    fn projection_removes_vorticity() {
        let g = grid();
        let psi = gaussian(&g, 2.0);
        let s = PrimitiveState::new(ScalarField::zeros(&g), perp(&psi.grad()), 0.0).unwrap();
        let (k, e) = project_zero_rv(&s);
        assert!(relative_vorticity(&k).max_abs() < 1e-12);
        let sum = &k.to_triple() + &e.to_triple();
        assert!((&sum - &s.to_triple()).max_abs() < 1e-15);
        let (kk, ee) = project_zero_rv(&k);
        assert!((&kk.to_triple() - &k.to_triple()).max_abs() < 1e-12);
        assert!(ee.to_triple().max_abs() < 1e-12);
    }

    #[test]
    fn projection_single_mode() {
        let g = make_grid(16, 2.0 * PI, 2.0 / 3.0).unwrap();
        let s = PrimitiveState::new(ScalarField::from_fn(&g, |x, _| -x.cos()), VectorField::zeros(&g), 0.0).unwrap();
        let (_, e) = project_zero_rv(&s);
        let expected = ScalarField::from_fn(&g, |x, _| -0.5 * x.cos());
        assert!((&e.rho - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn geostrophic_balance() {
        let g = grid();
        let psi = gaussian(&g, 2.0);
        assert_eq!(geostrophic_state(&psi, 0.0).unwrap().to_triple().max_abs(), 0.0);
        let s = geostrophic_state(&psi, 0.01).unwrap();
        assert!(super::super::linear_operator(&s.to_triple()).max_abs() < 1e-12);
        let expected = (&psi.laplacian() - &psi).scale(0.01);
        assert!((&relative_vorticity(&s) - &expected).max_abs() < 1e-15);
        assert!(matches!(geostrophic_state(&psi, -2.0), Err(ModelError::Vacuum { .. })));
    }

    #[test]
    fn initial_data_sizes() {
        let g = grid();
        let p = Profile::default();
        assert_eq!(make_initial_data(&g, 0.0, 0.0, &p, 1).unwrap().to_triple().max_abs(), 0.0);
        let s = make_initial_data(&g, 0.05, 0.0, &p, 1).unwrap();
        assert!(relative_vorticity(&s).max_abs() < 1e-12);
        assert!((triple_sobolev_norm(&s.to_triple(), 3.0) - 0.05).abs() < 1e-14);
        let s = make_initial_data(&g, 0.05, 1e-3, &p, 1).unwrap();
        assert!((relative_vorticity(&s).sobolev_norm(2.0) - 1e-3).abs() < 1e-10);
        let (k, _) = project_zero_rv(&s);
        assert!((triple_sobolev_norm(&k.to_triple(), 3.0) - 0.05).abs() < 1e-12);
        let again = make_initial_data(&g, 0.05, 1e-3, &p, 1).unwrap();
        assert_eq!(s.rho.physical(), again.rho.physical());
        let other = make_initial_data(&g, 0.05, 1e-3, &p, 2).unwrap();
        assert!((&other.rho - &s.rho).max_abs() > 0.0);
    }

    #[test]
    fn theta_tendency_has_zero_mean() {
        let g = grid();
        let s = PrimitiveState::new(
            random_smooth(&g, 1, 0.3),
            VectorField::new(random_smooth(&g, 2, 0.3), random_smooth(&g, 3, 0.3)).unwrap(),
            0.0,
        )
        .unwrap();
        let t = super::super::primitive_rhs(&s).unwrap();
        let dtheta = &curl(&VectorField::new(t[1].clone(), t[2].clone()).unwrap()).unwrap() - &t[0];
        assert!(dtheta.spectral()[[0, 0]].norm() <= 1e-14);
    }
}
