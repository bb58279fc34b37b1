//! The commuting vector fields `∂0, ∂1, ∂2, L_j = x_j∂t + t∂j, Ω12 = x1∂2 − x2∂1`.
//!
//! Products of vector fields are expanded symbolically into sums of
//! `c · t^q x1^p1 x2^p2 ∂t^a ∂1^b1 ∂2^b2`, so `Γ^α U` needs only time derivatives from
//! the evolution equation and spectral space derivatives.

use std::collections::{BTreeMap, HashMap};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::rsw::{assemble_coefficients, Dynamics, FieldTriple, SymState};

use super::norms::radius_squared;
use super::DiagError;

/// Highest supported product order of vector fields.
pub const MAX_VF_ORDER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VectorFieldOp {
    D0,
    D1,
    D2,
    L1,
    L2,
    Omega12,
}

impl VectorFieldOp {
    pub const ALL: [VectorFieldOp; 6] = [
        VectorFieldOp::D0,
        VectorFieldOp::D1,
        VectorFieldOp::D2,
        VectorFieldOp::L1,
        VectorFieldOp::L2,
        VectorFieldOp::Omega12,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Monomial {
    t_pow: u32,
    x_pow: [u32; 2],
    dt: u32,
    dx: [u32; 2],
}

/// Linear differential operator with polynomial coefficients in `(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    terms: BTreeMap<Monomial, f64>,
}

impl DiffOp {
    pub fn identity() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            Monomial {
                t_pow: 0,
                x_pow: [0, 0],
                dt: 0,
                dx: [0, 0],
            },
            1.0,
        );
        Self { terms }
    }

    fn add(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&m);
        }
    }

    fn merge(mut self, other: DiffOp, sign: f64) -> Self {
        for (m, c) in other.terms {
            self.add(m, sign * c);
        }
        self
    }

    /// `∂t ∘ self`.
    fn time_derivative(&self) -> Self {
        let mut out = Self { terms: BTreeMap::new() };
        for (&m, &c) in &self.terms {
            if m.t_pow > 0 {
                out.add(Monomial { t_pow: m.t_pow - 1, ..m }, c * m.t_pow as f64);
            }
            out.add(Monomial { dt: m.dt + 1, ..m }, c);
        }
        out
    }

    /// `∂_axis ∘ self` for `axis ∈ {0, 1}`.
    fn space_derivative(&self, axis: usize) -> Self {
        let mut out = Self { terms: BTreeMap::new() };
        for (&m, &c) in &self.terms {
            if m.x_pow[axis] > 0 {
                let mut x_pow = m.x_pow;
                x_pow[axis] -= 1;
                out.add(Monomial { x_pow, ..m }, c * m.x_pow[axis] as f64);
            }
            let mut dx = m.dx;
            dx[axis] += 1;
            out.add(Monomial { dx, ..m }, c);
        }
        out
    }

    fn times_x(&self, axis: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&m, &c)| {
                let mut x_pow = m.x_pow;
                x_pow[axis] += 1;
                (Monomial { x_pow, ..m }, c)
            })
            .collect();
        Self { terms }
    }

    fn times_t(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&m, &c)| (Monomial { t_pow: m.t_pow + 1, ..m }, c))
            .collect();
        Self { terms }
    }

    /// `Γ ∘ self`.
    pub fn then(&self, op: VectorFieldOp) -> Self {
        match op {
            VectorFieldOp::D0 => self.time_derivative(),
            VectorFieldOp::D1 => self.space_derivative(0),
            VectorFieldOp::D2 => self.space_derivative(1),
            VectorFieldOp::L1 | VectorFieldOp::L2 => {
                let j = if op == VectorFieldOp::L1 { 0 } else { 1 };
                self.time_derivative()
                    .times_x(j)
                    .merge(self.space_derivative(j).times_t(), 1.0)
            }
            VectorFieldOp::Omega12 => self
                .space_derivative(1)
                .times_x(0)
                .merge(self.space_derivative(0).times_x(1), -1.0),
        }
    }

    /// `Γ_{α_k} ∘ … ∘ Γ_{α_1}`, applying `ops[0]` first.
    pub fn product(ops: &[VectorFieldOp]) -> Self {
        ops.iter().fold(Self::identity(), |d, &op| d.then(op))
    }

    pub fn max_time_order(&self) -> u32 {
        self.terms.keys().map(|m| m.dt).max().unwrap_or(0)
    }
}

/// Caches `∂t^a ∂1^b1 ∂2^b2 U` at one instant.
pub struct JetCache {
    time: f64,
    time_derivs: Vec<FieldTriple>,
    fields: HashMap<(u32, u32, u32), FieldTriple>,
    x: Vec<f64>,
}

impl JetCache {
    /// `time_order` is the highest time derivative that will be requested.
    pub fn new(s: &SymState, dynamics: Dynamics, time_order: u32) -> Self {
        Self {
            time: s.time,
            time_derivs: dynamics.time_derivatives(s, time_order as usize),
            fields: HashMap::new(),
            x: s.grid().centered_coords().to_vec(),
        }
    }

    pub fn time_derivative(&self, a: usize) -> &FieldTriple {
        &self.time_derivs[a]
    }

    fn derivative(&mut self, a: u32, b1: u32, b2: u32) -> &FieldTriple {
        if !self.fields.contains_key(&(a, b1, b2)) {
            let base = &self.time_derivs[a as usize];
            let mut f = base.clone();
            for _ in 0..b1 {
                f = f.partial(0);
            }
            for _ in 0..b2 {
                f = f.partial(1);
            }
            self.fields.insert((a, b1, b2), f);
        }
        &self.fields[&(a, b1, b2)]
    }

    /// Evaluates `D U`, dealiased.
    pub fn apply(&mut self, d: &DiffOp) -> FieldTriple {
        let grid = self.time_derivs[0].grid().clone();
        let n = grid.n();
        let mut out: [Array2<f64>; 3] = std::array::from_fn(|_| Array2::zeros((n, n)));
        let t = self.time;
        let x = self.x.clone();
        for (m, &c) in &d.terms {
            let coef = c * t.powi(m.t_pow as i32);
            if coef == 0.0 {
                continue;
            }
            let field = self.derivative(m.dt, m.dx[0], m.dx[1]).clone();
            let weight = Array2::from_shape_fn((n, n), |(i, j)| {
                coef * x[i].powi(m.x_pow[0] as i32) * x[j].powi(m.x_pow[1] as i32)
            });
            for p in 0..3 {
                ndarray::Zip::from(&mut out[p])
                    .and(&weight)
                    .and(field[p].physical())
                    .for_each(|o, &w, &v| *o += w * v);
            }
        }
        let [a, b, c] = out;
        FieldTriple([
            crate::spectral::ScalarField::from_physical(&grid, a),
            crate::spectral::ScalarField::from_physical(&grid, b),
            crate::spectral::ScalarField::from_physical(&grid, c),
        ])
        .dealias()
    }
}

/// `Γ U` for a single vector field, with `∂tU` from the evolution equation.
pub fn vf_apply(which: VectorFieldOp, s: &SymState, dynamics: Dynamics) -> FieldTriple {
    let d = DiffOp::identity().then(which);
    JetCache::new(s, dynamics, d.max_time_order()).apply(&d)
}

/// All products `Γ^α` with `|α| ≤ order`, the empty product first.
pub fn multi_indices(order: usize) -> Vec<Vec<VectorFieldOp>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..order {
        let mut next = Vec::new();
        for alpha in &layer {
            for op in VectorFieldOp::ALL {
                let mut a: Vec<VectorFieldOp> = alpha.clone();
                a.push(op);
                next.push(a);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn check_order(order: usize) -> Result<(), DiagError> {
    if order > MAX_VF_ORDER {
        Err(DiagError::UnsupportedOrder(order))
    } else {
        Ok(())
    }
}

/// Which quantity a vector-field norm is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VfTarget {
    /// `U` itself.
    U,
    /// `∂U = (∂tU, ∂1U, ∂2U)`, measured as one nine-component vector.
    Gradient,
}

/// Pointwise length weighted by `(1 + t + |x|)^{−d}`, maximized.
fn weighted_sup(fields: &[FieldTriple], t: f64, d: f64) -> f64 {
    let grid = fields[0].grid();
    let r2 = radius_squared(grid);
    let n = grid.n();
    let mut sq = Array2::<f64>::zeros((n, n));
    for f in fields {
        for p in 0..3 {
            ndarray::Zip::from(&mut sq).and(f[p].physical()).for_each(|a, &v| *a += v * v);
        }
    }
    sq.indexed_iter()
        .map(|(idx, &v)| v.sqrt() * (1.0 + t + r2[idx].sqrt()).powf(-d))
        .fold(0.0, f64::max)
}

fn l2(fields: &[FieldTriple]) -> f64 {
    fields.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt()
}

/// `Σ_{|α| ≤ order} ‖Γ^α V‖`, `p = 2` (`d` ignored) or `p = ∞` with weight `(1+t+|x|)^{−d}`.
pub fn vf_norm(
    s: &SymState,
    dynamics: Dynamics,
    order: usize,
    target: VfTarget,
    p: super::NormKind,
    d: f64,
) -> Result<f64, DiagError> {
    check_order(order)?;
    let extra = if target == VfTarget::Gradient { 1 } else { 0 };
    let mut cache = JetCache::new(s, dynamics, (order + extra) as u32);
    let mut total = 0.0;
    for alpha in multi_indices(order) {
        let base = DiffOp::product(&alpha);
        let parts: Vec<FieldTriple> = match target {
            VfTarget::U => vec![cache.apply(&base)],
            VfTarget::Gradient => [VectorFieldOp::D0, VectorFieldOp::D1, VectorFieldOp::D2]
                .iter()
                .map(|&op| cache.apply(&base.then(op)))
                .collect(),
        };
        total += match p {
            super::NormKind::L2 => l2(&parts),
            super::NormKind::Sup => weighted_sup(&parts, s.time, d),
        };
    }
    Ok(total)
}

/// Finite-order proxy of the size functional:
/// `|U|_{Γ,2,−1} + ‖U‖_{Γ,2} + ‖∂U‖_{Γ,2}` at the state's time.
pub fn x_proxy(s: &SymState, dynamics: Dynamics) -> Result<f64, DiagError> {
    let sup = vf_norm(s, dynamics, MAX_VF_ORDER, VfTarget::U, super::NormKind::Sup, -1.0)?;
    let u = vf_norm(s, dynamics, MAX_VF_ORDER, VfTarget::U, super::NormKind::L2, 0.0)?;
    let du = vf_norm(s, dynamics, MAX_VF_ORDER, VfTarget::Gradient, super::NormKind::L2, 0.0)?;
    Ok(sup + u + du)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `F` including the quasilinear term.
    pub value: f64,
    /// `F` without the quasilinear term.
    pub quadratic: f64,
    /// Measured `max_ij sup_x |A_ij(U)|`.
    pub max_coefficient_norm: f64,
}

/// `F = ½Σ_α(‖∂tΓ^αU‖² + ‖∇Γ^αU‖² + ‖Γ^αU‖²) + ½Σ_α Σ_ij ⟨A_ij(U)∂iΓ^αU, ∂jΓ^αU⟩`.
pub fn energy_f(s: &SymState, dynamics: Dynamics, order: usize) -> Result<EnergyReport, DiagError> {
    check_order(order)?;
    let mut cache = JetCache::new(s, dynamics, (order + 1) as u32);
    let coeffs = assemble_coefficients(cache.time_derivative(0));
    let h2 = s.grid().h().powi(2);
    let mut quadratic = 0.0;
    let mut quasi = 0.0;
    for alpha in multi_indices(order) {
        let base = DiffOp::product(&alpha);
        let g = cache.apply(&base);
        let gt = cache.apply(&base.then(VectorFieldOp::D0));
        let g1 = cache.apply(&base.then(VectorFieldOp::D1));
        let g2 = cache.apply(&base.then(VectorFieldOp::D2));
        quadratic += l2(&[gt, g1.clone(), g2.clone(), g]).powi(2);
        let grads = [&g1, &g2];
        for i in 0..2 {
            for j in 0..2 {
                let ag = crate::rsw::apply_matrix(&coeffs.a[i][j], grads[i]);
                for p in 0..3 {
                    let dot: f64 = ag[p].physical().iter().zip(grads[j][p].physical()).map(|(a, b)| a * b).sum();
                    quasi += dot * h2;
                }
            }
        }
    }
    Ok(EnergyReport {
        value: 0.5 * (quadratic + quasi),
        quadratic: 0.5 * quadratic,
        max_coefficient_norm: coeffs.max_quasilinear_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::NormKind;
    use crate::rsw::{make_initial_data, Profile};
    use crate::spectral::{make_grid, Grid, ScalarField, VectorField};
    use crate::test_util::gaussian;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        make_grid(128, 12.0 * PI, 2.0 / 3.0).unwrap()
    }

    #[test]
    fn symbolic_commutators() {
        // [∂t, L1] = ∂1 and [∂1, Ω12] = ∂2
        let a = DiffOp::product(&[VectorFieldOp::L1, VectorFieldOp::D0]);
        let b = DiffOp::product(&[VectorFieldOp::D0, VectorFieldOp::L1]);
        assert_eq!(a.merge(b, -1.0), DiffOp::identity().then(VectorFieldOp::D1));
        let a = DiffOp::product(&[VectorFieldOp::Omega12, VectorFieldOp::D1]);
        let b = DiffOp::product(&[VectorFieldOp::D1, VectorFieldOp::Omega12]);
        assert_eq!(a.merge(b, -1.0), DiffOp::identity().then(VectorFieldOp::D2));
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(0).len(), 1);
        assert_eq!(multi_indices(1).len(), 7);
        assert_eq!(multi_indices(2).len(), 43);
    }

    #[test]
    fn rotation_annihilates_radial_fields() {
        let g = grid();
        let f = gaussian(&g, 2.0);
        let s = SymState {
            m: f.clone(),
            u: VectorField::new(f.scale(0.5), f.scale(-0.25)).unwrap(),
            time: 0.0,
        };
        let out = vf_apply(VectorFieldOp::Omega12, &s, Dynamics::Nonlinear);
        assert!(out.max_abs() < 1e-10, "{}", out.max_abs());
        assert_eq!(vf_apply(VectorFieldOp::D0, &SymState::zeros(&g), Dynamics::Nonlinear).max_abs(), 0.0);
    }

    #[test]
    fn boost_at_time_zero() {
        let g = grid();
        let f = gaussian(&g, 2.0);
        let s = SymState {
            m: f.clone(),
            u: VectorField::new(ScalarField::zeros(&g), ScalarField::zeros(&g)).unwrap(),
            time: 0.0,
        };
        let l1 = vf_apply(VectorFieldOp::L1, &s, Dynamics::Linear);
        let ut = crate::rsw::linear_operator(&s.to_triple());
        let x = g.centered_coords().to_vec();
        let expected = ut.map(|c| {
            let xs = x.clone();
            let n = g.n();
            let w = ndarray::Array2::from_shape_fn((n, n), |(i, _)| xs[i]);
            ScalarField::from_physical(&g, c.physical() * &w)
        });
        let err = (&l1 - &expected).max_abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn norms_nest_by_order() {
        let g = grid();
        let p = make_initial_data(&g, 0.1, 0.0, &Profile::default(), 4).unwrap();
        let s = p.to_sym().unwrap();
        let v: Vec<f64> = (0..=2)
            .map(|k| vf_norm(&s, Dynamics::Nonlinear, k, VfTarget::U, NormKind::L2, 0.0).unwrap())
            .collect();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
        assert!((v[0] - s.to_triple().l2_norm()).abs() < 1e-12 * v[0]);
        assert!(matches!(
            vf_norm(&s, Dynamics::Nonlinear, 3, VfTarget::U, NormKind::L2, 0.0),
            Err(DiagError::UnsupportedOrder(3))
        ));
        assert_eq!(x_proxy(&SymState::zeros(&g), Dynamics::Nonlinear).unwrap(), 0.0);
    }

    #[test]
    fn energy_small_amplitude_limit() {
        let g = grid();
        assert_eq!(energy_f(&SymState::zeros(&g), Dynamics::Nonlinear, 1).unwrap().value, 0.0);
        for a in [1e-2, 1e-3] {
            let p = make_initial_data(&g, a, 0.0, &Profile::default(), 5).unwrap();
            let rep = energy_f(&p.to_sym().unwrap(), Dynamics::Nonlinear, 1).unwrap();
            let ratio = rep.value / rep.quadratic;
            assert!((1.0 - 2.0 * a..=1.0 + 2.0 * a).contains(&ratio), "{a}: {ratio}");
            assert!(rep.max_coefficient_norm <= 0.25);
        }
    }
}
