//! Exact solutions of the linear problems.
//!
//! Frequencies are `⟨k⟩ = (1 + |k|²)^{1/2}` on the derivative wavenumbers, so the
//! propagators agree with the spectral `∂` and `Δ` on every mode including Nyquist.

use crate::rsw::{linear_operator, FieldTriple};

fn bracket(k1: f64, k2: f64) -> f64 {
    (1.0 + k1 * k1 + k2 * k2).sqrt()
}

/// Free Klein–Gordon flow: `U(t) = cos(⟨k⟩t)U0 + sin(⟨k⟩t)/⟨k⟩ U1` and
/// `∂tU(t) = −⟨k⟩sin(⟨k⟩t)U0 + cos(⟨k⟩t)U1`, componentwise.
pub fn linear_kg_propagator(u0: &FieldTriple, u1: &FieldTriple, t: f64) -> (FieldTriple, FieldTriple) {
    let cos = |k1: f64, k2: f64| (bracket(k1, k2) * t).cos();
    let sinc = |k1: f64, k2: f64| {
        let w = bracket(k1, k2);
        (w * t).sin() / w
    };
    let msin = |k1: f64, k2: f64| {
        let w = bracket(k1, k2);
        -w * (w * t).sin()
    };
    let apply = |f: &FieldTriple, s: &dyn Fn(f64, f64) -> f64| f.map(|c| c.derivative_multiplier(s));
    let u = &apply(u0, &cos) + &apply(u1, &sinc);
    let ut = &apply(u0, &msin) + &apply(u1, &cos);
    (u, ut)
}

/// `exp(t𝓛)U` for the first-order linear system `∂tU = 𝓛U`.
///
/// Per mode the symbol of `𝓛` has eigenvalues `0, ±i⟨k⟩`, so
/// `exp(t𝓛) = I + sin(⟨k⟩t)/⟨k⟩ 𝓛 + (1 − cos(⟨k⟩t))/⟨k⟩² 𝓛²`.
pub fn linear_flow(u: &FieldTriple, t: f64) -> FieldTriple {
    let lu = linear_operator(u);
    let llu = linear_operator(&lu);
    let sinc = |k1: f64, k2: f64| {
        let w = bracket(k1, k2);
        (w * t).sin() / w
    };
    let vers = |k1: f64, k2: f64| {
        let w = bracket(k1, k2);
        // 1 − cos(wt) = 2 sin²(wt/2)
        2.0 * (0.5 * w * t).sin().powi(2) / (w * w)
    };
    let a = lu.map(|f| f.derivative_multiplier(sinc));
    let b = llu.map(|f| f.derivative_multiplier(vers));
    FieldTriple::linear_combination(&[(1.0, u), (1.0, &a), (1.0, &b)])
}

/// `‖∂tU‖² + ‖∇U‖² + ‖U‖²` summed over components.
pub fn linear_energy(u: &FieldTriple, ut: &FieldTriple) -> f64 {
    let mut e = 0.0;
    for p in 0..3 {
        let f = &u[p];
        e += ut[p].l2_norm_spectral().powi(2)
            + f.partial(0).l2_norm_spectral().powi(2)
            + f.partial(1).l2_norm_spectral().powi(2)
            + f.l2_norm_spectral().powi(2);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, Grid, ScalarField};
    use crate::test_util::random_band_limited;
    use std::f64::consts::PI;

    fn random_triple(g: &Grid, seed: u64) -> FieldTriple {
        FieldTriple([
            random_band_limited(g, seed),
            random_band_limited(g, seed + 1),
            random_band_limited(g, seed + 2),
        ])
    }

    #[test]
    fn propagator_identity_and_constants() {
        let g = make_grid(16, 2.0 * PI, 2.0 / 3.0).unwrap();
        let u0 = random_triple(&g, 1);
        let u1 = random_triple(&g, 4);
        let (u, ut) = linear_kg_propagator(&u0, &u1, 0.0);
        assert!((&u - &u0).max_abs() < 1e-15 && (&ut - &u1).max_abs() < 1e-15);

        let c = |v: f64| ScalarField::constant(&g, v);
        let a = FieldTriple([c(1.0), c(-2.0), c(0.5)]);
        let b = FieldTriple([c(0.3), c(0.0), c(1.0)]);
        let t = 1.7;
        let (u, _) = linear_kg_propagator(&a, &b, t);
        let expected = FieldTriple::linear_combination(&[(t.cos(), &a), (t.sin(), &b)]);
        assert!((&u - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn propagator_group_property_and_reversal() {
        let g = make_grid(32, 10.0, 2.0 / 3.0).unwrap();
        let u0 = random_triple(&g, 7);
        let u1 = random_triple(&g, 10);
        let (a, at) = linear_kg_propagator(&u0, &u1, 2.5);
        let (b, bt) = linear_kg_propagator(&a, &at, 4.0);
        let (c, ct) = linear_kg_propagator(&u0, &u1, 6.5);
        assert!((&b - &c).max_abs() < 1e-12 && (&bt - &ct).max_abs() < 1e-12);
        let (r, rt) = linear_kg_propagator(&c, &ct, -6.5);
        assert!((&r - &u0).max_abs() < 1e-12 && (&rt - &u1).max_abs() < 1e-12);
    }

    #[test]
    fn propagator_conserves_energy() {
        let g = make_grid(32, 10.0, 2.0 / 3.0).unwrap();
        let u0 = random_triple(&g, 20);
        let u1 = random_triple(&g, 23);
        let e0 = linear_energy(&u0, &u1);
        for t in [0.5, 3.0, 17.0, 55.5, 100.0] {
            let (u, ut) = linear_kg_propagator(&u0, &u1, t);
            assert!((linear_energy(&u, &ut) - e0).abs() < 1e-12 * e0);
        }
    }

    #[test]
    fn linear_flow_solves_first_order_system() {
        let g = make_grid(32, 10.0, 2.0 / 3.0).unwrap();
        let u = random_triple(&g, 30);
        assert!((&linear_flow(&u, 0.0) - &u).max_abs() < 1e-15);
        let a = linear_flow(&linear_flow(&u, 1.3), 2.1);
        assert!((&a - &linear_flow(&u, 3.4)).max_abs() < 1e-12);
        // centered difference in time against 𝓛U
        let h = 1e-4;
        let d = FieldTriple::linear_combination(&[(0.5 / h, &linear_flow(&u, h)), (-0.5 / h, &linear_flow(&u, -h))]);
        assert!((&d - &linear_operator(&u)).max_abs() < 1e-6 * linear_operator(&u).max_abs());
    }
}
