//! Tendencies of the primitive and symmetrized systems.
//!
//! With `U = (m, u1, u2)` the symmetrized system reads
//! `∂tU = 𝓛U − P Σ_a B_a(U) ∂aU`, where `B_a(V) = v_a I + ½ v_m J_a`,
//! `𝓛U = −Σ_a J_a ∂aU + KU`, `KU = (0, u2, −u1)` and `P` is dealiasing.

use ndarray::Array2;

use crate::spectral::{Grid, ScalarField};

use super::{Dynamics, FieldTriple, ModelError, PrimitiveState};

pub(crate) type Phys = [Array2<f64>; 3];

pub(crate) fn zeros_phys(grid: &Grid) -> Phys {
    let n = grid.n();
    [Array2::zeros((n, n)), Array2::zeros((n, n)), Array2::zeros((n, n))]
}

pub(crate) fn triple_from_phys(grid: &Grid, p: Phys) -> FieldTriple {
    let [a, b, c] = p;
    FieldTriple([
        ScalarField::from_physical(grid, a),
        ScalarField::from_physical(grid, b),
        ScalarField::from_physical(grid, c),
    ])
}

fn slices(t: &FieldTriple) -> [&[f64]; 3] {
    [
        t[0].physical().as_slice().expect("standard layout"),
        t[1].physical().as_slice().expect("standard layout"),
        t[2].physical().as_slice().expect("standard layout"),
    ]
}

/// Adds `c · Σ_a B_a(V) ∂aW` to `out`, given `w1 = ∂1W` and `w2 = ∂2W`.
pub(crate) fn add_bilinear(out: &mut Phys, c: f64, v: &FieldTriple, w1: &FieldTriple, w2: &FieldTriple) {
    let [vm, v1, v2] = slices(v);
    let [a_m, a_1, a_2] = slices(w1);
    let [b_m, b_1, b_2] = slices(w2);
    let [om, o1, o2] = out;
    let om = om.as_slice_mut().expect("standard layout");
    let o1 = o1.as_slice_mut().expect("standard layout");
    let o2 = o2.as_slice_mut().expect("standard layout");
    for i in 0..om.len() {
        let half_m = 0.5 * vm[i];
        om[i] += c * (v1[i] * a_m[i] + v2[i] * b_m[i] + half_m * (a_1[i] + b_2[i]));
        o1[i] += c * (v1[i] * a_1[i] + v2[i] * b_1[i] + half_m * a_m[i]);
        o2[i] += c * (v1[i] * a_2[i] + v2[i] * b_2[i] + half_m * b_m[i]);
    }
}

/// `Σ_a B_a(V) ∂aW` in physical space, not dealiased.
pub fn advection(v: &FieldTriple, w: &FieldTriple) -> FieldTriple {
    let mut out = zeros_phys(v.grid());
    add_bilinear(&mut out, 1.0, v, &w.partial(0), &w.partial(1));
    triple_from_phys(v.grid(), out)
}

/// The linear part `𝓛U = (−∇·u, −∂1m + u2, −∂2m − u1)`.
pub fn linear_operator(u: &FieldTriple) -> FieldTriple {
    let [m, u1, u2] = &u.0;
    let div = &u1.partial(0) + &u2.partial(1);
    FieldTriple([
        -&div,
        &(-&m.partial(0)) + u2,
        &(-&m.partial(1)) - u1,
    ])
}

/// `∂tU` of the symmetrized system.
pub fn symmetrized_tendency(u: &FieldTriple) -> FieldTriple {
    let quad = advection(u, u).dealias();
    &linear_operator(u) - &quad
}

/// Symmetrized tendency `(∂tm, ∂tu)` of a state.
pub fn symmetrized_rhs(s: &super::SymState) -> FieldTriple {
    symmetrized_tendency(&s.to_triple())
}

/// Primitive tendency `(∂tρ, ∂tu)` with dealiased products.
pub fn primitive_rhs(s: &PrimitiveState) -> Result<FieldTriple, ModelError> {
    s.check_admissible()?;
    let grid = s.grid();
    let t = s.to_triple();
    let d1 = t.partial(0);
    let d2 = t.partial(1);
    let [rho, u1, u2] = slices(&t);
    let [_, a1, a2] = slices(&d1);
    let [_, b1, b2] = slices(&d2);
    let n = grid.n();
    let mut flux1 = Array2::zeros((n, n));
    let mut flux2 = Array2::zeros((n, n));
    let mut adv1 = Array2::zeros((n, n));
    let mut adv2 = Array2::zeros((n, n));
    {
        let f1 = flux1.as_slice_mut().expect("standard layout");
        let f2 = flux2.as_slice_mut().expect("standard layout");
        let g1 = adv1.as_slice_mut().expect("standard layout");
        let g2 = adv2.as_slice_mut().expect("standard layout");
        for i in 0..f1.len() {
            f1[i] = rho[i] * u1[i];
            f2[i] = rho[i] * u2[i];
            g1[i] = u1[i] * a1[i] + u2[i] * b1[i];
            g2[i] = u1[i] * a2[i] + u2[i] * b2[i];
        }
    }
    let flux_div = &ScalarField::from_physical(grid, flux1).partial(0)
        + &ScalarField::from_physical(grid, flux2).partial(1);
    let quad = FieldTriple([
        flux_div,
        ScalarField::from_physical(grid, adv1),
        ScalarField::from_physical(grid, adv2),
    ])
    .dealias();
    Ok(&linear_operator(&t) - &quad)
}

/// `[U, ∂tU, …, ∂t^order U]` by repeated differentiation of the evolution equation:
/// `∂t^{n+1}U = 𝓛∂t^nU − P Σ_i C(n,i) Σ_a B_a(∂t^iU) ∂a∂t^{n−i}U`.
pub fn time_derivatives(u: &FieldTriple, order: usize, dynamics: Dynamics) -> Vec<FieldTriple> {
    let grid = u.grid().clone();
    let mut derivs = vec![u.clone()];
    let mut grads: Vec<(FieldTriple, FieldTriple)> = Vec::new();
    for n in 0..order {
        let lin = linear_operator(&derivs[n]);
        let next = match dynamics {
            Dynamics::Linear => lin,
            Dynamics::Nonlinear => {
                grads.push((derivs[n].partial(0), derivs[n].partial(1)));
                let mut acc = zeros_phys(&grid);
                let mut binom = 1.0;
                for i in 0..=n {
                    let (w1, w2) = &grads[n - i];
                    add_bilinear(&mut acc, binom, &derivs[i], w1, w2);
                    binom = binom * (n - i) as f64 / (i + 1) as f64;
                }
                &lin - &triple_from_phys(&grid, acc).dealias()
            }
        };
        derivs.push(next);
    }
    derivs
}
