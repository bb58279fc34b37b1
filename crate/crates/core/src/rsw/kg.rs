//! Second-order Klein–Gordon form of the symmetrized system under zero relative vorticity:
//!
//! `∂ttU − ΔU + U = Σ_ab A_ab(U) ∂a∂bU + Σ_a A_0a(U) ∂a∂tU + R`.

use ndarray::Array2;

use crate::spectral::ScalarField;

use super::rhs::{add_bilinear, linear_operator, triple_from_phys, zeros_phys, Phys};
use super::{Dynamics, FieldTriple, KGState, SymState};

type Mat = [[f64; 3]; 3];

const IDENTITY: Mat = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
const J1: Mat = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
const J2: Mat = [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
const ZERO: Mat = [[0.0; 3]; 3];

fn j(a: usize) -> &'static Mat {
    if a == 0 {
        &J1
    } else {
        &J2
    }
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut out = ZERO;
    for p in 0..3 {
        for q in 0..3 {
            out[p][q] = (0..3).map(|r| a[p][r] * b[r][q]).sum();
        }
    }
    out
}

fn axpy(c: f64, a: &Mat, out: &mut Mat) {
    for p in 0..3 {
        for q in 0..3 {
            out[p][q] += c * a[p][q];
        }
    }
}

/// 3×3 matrix whose entries are fields.
pub type MatrixField = [[ScalarField; 3]; 3];

/// Coefficients of the quasilinear terms, each entry linear in `U`.
///
/// `A_ab = ½(u_b J_a + ½ m J_a J_b) + ½(u_a J_b + ½ m J_b J_a)` and
/// `A_0a = −(u_a I + ½ m J_a)`. Indices are zero-based.
#[derive(Debug, Clone)]
pub struct CoefficientMatrices {
    pub a: [[MatrixField; 2]; 2],
    pub a0: [MatrixField; 2],
}

/// Coefficient tensors `(C_m, C_u1, C_u2)` with `A = C_m m + C_u1 u1 + C_u2 u2`.
fn coefficient_tensors(a: usize, b: Option<usize>) -> [Mat; 3] {
    let mut t = [ZERO; 3];
    match b {
        Some(b) => {
            axpy(0.25, &matmul(j(a), j(b)), &mut t[0]);
            axpy(0.25, &matmul(j(b), j(a)), &mut t[0]);
            axpy(0.5, j(a), &mut t[1 + b]);
            axpy(0.5, j(b), &mut t[1 + a]);
        }
        None => {
            axpy(-0.5, j(a), &mut t[0]);
            axpy(-1.0, &IDENTITY, &mut t[1 + a]);
        }
    }
    t
}

fn assemble(u: &FieldTriple, t: &[Mat; 3]) -> MatrixField {
    let grid = u.grid();
    let n = grid.n();
    let entry = |p: usize, q: usize| {
        let mut out = Array2::zeros((n, n));
        for (c, field) in t.iter().zip(u.iter()) {
            if c[p][q] != 0.0 {
                out.scaled_add(c[p][q], field.physical());
            }
        }
        ScalarField::from_physical(grid, out)
    };
    std::array::from_fn(|p| std::array::from_fn(|q| entry(p, q)))
}

pub fn assemble_coefficients(u: &FieldTriple) -> CoefficientMatrices {
    CoefficientMatrices {
        a: std::array::from_fn(|a| std::array::from_fn(|b| assemble(u, &coefficient_tensors(a, Some(b))))),
        a0: std::array::from_fn(|a| assemble(u, &coefficient_tensors(a, None))),
    }
}

/// Adds `c · M W` to `out` pointwise.
fn add_matvec(out: &mut Phys, c: f64, m: &MatrixField, w: &FieldTriple) {
    for p in 0..3 {
        for q in 0..3 {
            let coeff = m[p][q].physical();
            let wq = w[q].physical();
            ndarray::Zip::from(&mut out[p])
                .and(coeff)
                .and(wq)
                .for_each(|o, &a, &b| *o += c * a * b);
        }
    }
}

/// `M W` pointwise.
pub fn apply_matrix(m: &MatrixField, w: &FieldTriple) -> FieldTriple {
    let mut out = zeros_phys(w.grid());
    add_matvec(&mut out, 1.0, m, w);
    triple_from_phys(w.grid(), out)
}

/// Largest pointwise Frobenius norm of a matrix field, an upper bound for its operator norm.
pub fn matrix_sup_norm(m: &MatrixField) -> f64 {
    let n = m[0][0].grid().n();
    let mut sq = Array2::<f64>::zeros((n, n));
    for row in m {
        for e in row {
            ndarray::Zip::from(&mut sq).and(e.physical()).for_each(|s, &v| *s += v * v);
        }
    }
    sq.iter().fold(0.0, |acc: f64, v| acc.max(v.sqrt()))
}

impl CoefficientMatrices {
    /// `max_{a,b} sup_x |A_ab(x)|`.
    pub fn max_quasilinear_norm(&self) -> f64 {
        self.a.iter().flatten().map(matrix_sup_norm).fold(0.0, f64::max)
    }

    /// `Σ_ab A_ab ∂a∂bW + Σ_a A_0a ∂a Wt`, not dealiased.
    pub fn apply(&self, w: &FieldTriple, wt: &FieldTriple) -> FieldTriple {
        let mut out = zeros_phys(w.grid());
        for a in 0..2 {
            for b in 0..2 {
                let d2 = w.map(|f| f.partial2(a, b));
                add_matvec(&mut out, 1.0, &self.a[a][b], &d2);
            }
            add_matvec(&mut out, 1.0, &self.a0[a], &wt.partial(a));
        }
        triple_from_phys(w.grid(), out)
    }
}

/// `J_a W` for `a ∈ {0, 1}` in physical space.
fn add_j(out: &mut Phys, a: usize, c: f64, w: &Phys) {
    let (m, ua) = (0, 1 + a);
    out[m].scaled_add(c, &w[ua]);
    out[ua].scaled_add(c, &w[m]);
}

/// `KW = (0, w2, −w1)` in physical space.
fn add_k(out: &mut Phys, c: f64, w: &Phys) {
    out[1].scaled_add(c, &w[2]);
    out[2].scaled_add(-c, &w[1]);
}

/// Quadratic remainder `R` of the Klein–Gordon form:
///
/// `R = N3 + Σ_a J_a G(∂aU, U) − K G(U, U) − G(∂tU, U)` with
/// `G(V, W) = Σ_b B_b(V) ∂bW` and `N3 = ¼(−m², ∂2(m²), −∂1(m²))`. Dealiased.
pub fn kg_quadratic_remainder(s: &KGState) -> FieldTriple {
    let grid = s.u.grid();
    let u = &s.u;
    let (w1, w2) = (u.partial(0), u.partial(1));

    let mut out = zeros_phys(grid);
    for a in 0..2 {
        let mut g = zeros_phys(grid);
        let da = if a == 0 { &w1 } else { &w2 };
        add_bilinear(&mut g, 1.0, da, &w1, &w2);
        add_j(&mut out, a, 1.0, &g);
    }
    let mut g = zeros_phys(grid);
    add_bilinear(&mut g, 1.0, u, &w1, &w2);
    add_k(&mut out, -1.0, &g);
    add_bilinear(&mut out, -1.0, &s.ut, &w1, &w2);

    let m_sq = u[0].map_physical(|v| v * v);
    let mut r = triple_from_phys(grid, out);
    r = FieldTriple::linear_combination(&[
        (1.0, &r),
        (
            0.25,
            &FieldTriple([m_sq.scale(-1.0), m_sq.partial(1), m_sq.partial(0).scale(-1.0)]),
        ),
    ]);
    r.dealias()
}

/// LHS minus RHS of the Klein–Gordon form along the symmetrized flow.
///
/// `∂tU` and `∂ttU` come from the evolution equation. Analytically the result equals
/// `(−θ, ∂2θ, −∂1θ)` with `θ = ∇×u − m − ¼m²`, so it vanishes exactly when the
/// relative vorticity does.
pub fn kg_residual(s: &SymState) -> FieldTriple {
    let derivs = Dynamics::Nonlinear.time_derivatives(s, 2);
    let (u, ut, utt) = (&derivs[0], &derivs[1], &derivs[2]);
    let lhs = FieldTriple::linear_combination(&[(1.0, utt), (-1.0, &u.map(ScalarField::laplacian)), (1.0, u)]);
    let coeffs = assemble_coefficients(u);
    let quasi = coeffs.apply(u, ut).dealias();
    let kg = KGState {
        u: u.clone(),
        ut: ut.clone(),
        time: s.time,
    };
    let r = kg_quadratic_remainder(&kg);
    FieldTriple::linear_combination(&[(1.0, &lhs), (-1.0, &quasi), (-1.0, &r)])
}

/// `∂ttU − ΔU + U` along the linear flow `∂tU = 𝓛U`; vanishes when `∇×u = m`.
pub fn linear_kg_residual(u: &FieldTriple) -> FieldTriple {
    let utt = linear_operator(&linear_operator(u));
    FieldTriple::linear_combination(&[(1.0, &utt), (-1.0, &u.map(ScalarField::laplacian)), (1.0, u)])
}
