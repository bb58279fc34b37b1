use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::rsw::FieldTriple;
use crate::spectral::{Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L2,
    Sup,
}

/// `‖(1 + |x|²)^{s/2} (1 − Δ)^{l/2} v‖_{L^p}` for `p ∈ {2, ∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub l: f64,
    pub s: f64,
    pub p: NormKind,
}

impl NormSpec {
    pub fn sobolev(l: f64) -> Self {
        Self { l, s: 0.0, p: NormKind::L2 }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.l >= 0.0 && self.s >= 0.0) {
            return Err(format!("norm orders must be nonnegative, got l={} s={}", self.l, self.s));
        }
        Ok(())
    }

    /// Short column label such as `h3` or `h1_2_sup`.
    pub fn label(&self) -> String {
        let mut out = format!("h{}", self.l);
        if self.s != 0.0 {
            out.push_str(&format!("_{}", self.s));
        }
        if self.p == NormKind::Sup {
            out.push_str("_sup");
        }
        out
    }
}

/// `|x − center|²` on the grid, in box-centered coordinates.
pub(crate) fn radius_squared(grid: &Grid) -> Array2<f64> {
    let x = grid.centered_coords();
    let n = grid.n();
    Array2::from_shape_fn((n, n), |(i, j)| x[i] * x[i] + x[j] * x[j])
}

fn bessel_potential(f: &ScalarField, l: f64) -> ScalarField {
    if l == 0.0 {
        return f.clone();
    }
    f.fourier_multiplier(|k1, k2| (1.0 + k1 * k1 + k2 * k2).powf(0.5 * l))
        .expect("bessel symbol is finite")
}

/// Weighted Sobolev norm of a scalar field with quadrature weight `h²`.
pub fn weighted_norm(f: &ScalarField, spec: &NormSpec) -> f64 {
    weighted_norm_components(std::slice::from_ref(f), spec)
}

/// Weighted norm of a triple: pointwise Euclidean length over components.
pub fn weighted_norm_triple(t: &FieldTriple, spec: &NormSpec) -> f64 {
    weighted_norm_components(&t.0, spec)
}

fn weighted_norm_components(fields: &[ScalarField], spec: &NormSpec) -> f64 {
    let grid = fields[0].grid();
    let n = grid.n();
    let mut sq = Array2::<f64>::zeros((n, n));
    for f in fields {
        let g = bessel_potential(f, spec.l);
        ndarray::Zip::from(&mut sq).and(g.physical()).for_each(|a, &v| *a += v * v);
    }
    if spec.s != 0.0 {
        let r2 = radius_squared(grid);
        ndarray::Zip::from(&mut sq).and(&r2).for_each(|a, &r| *a *= (1.0 + r).powf(spec.s));
    }
    match spec.p {
        NormKind::L2 => sq.sum().sqrt() * grid.h(),
        NormKind::Sup => sq.iter().fold(0.0, |m: f64, &v| m.max(v)).sqrt(),
    }
}

/// Smallest `r` such that the pointwise length of `t` is below `tol` at every grid
/// point with `|x − center| > r`.
pub fn support_radius(t: &FieldTriple, tol: f64) -> f64 {
    let r2 = radius_squared(t.grid());
    let (a, b, c) = (t[0].physical(), t[1].physical(), t[2].physical());
    let mut worst: f64 = 0.0;
    for (idx, &r) in r2.indexed_iter() {
        let v = (a[idx] * a[idx] + b[idx] * b[idx] + c[idx] * c[idx]).sqrt();
        if v >= tol {
            worst = worst.max(r);
        }
    }
    worst.sqrt()
}
