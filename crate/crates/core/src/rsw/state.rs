use std::ops::{Add, Index, Sub};

use serde::{Deserialize, Serialize};

use crate::spectral::{Grid, ScalarField, SpectralError, VectorField};

use super::ModelError;

/// Three scalar fields on one grid, used for `(ρ, u1, u2)`, `(m, u1, u2)` and tendencies.
#[derive(Debug, Clone)]
pub struct FieldTriple(pub [ScalarField; 3]);

impl FieldTriple {
    pub fn new(a: ScalarField, b: ScalarField, c: ScalarField) -> Result<Self, SpectralError> {
        a.grid().check_same(b.grid())?;
        a.grid().check_same(c.grid())?;
        Ok(Self([a, b, c]))
    }

    pub fn zeros(grid: &Grid) -> Self {
        let z = ScalarField::zeros(grid);
        Self([z.clone(), z.clone(), z])
    }

    pub fn grid(&self) -> &Grid {
        self.0[0].grid()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScalarField> {
        self.0.iter()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self([f(&self.0[0]), f(&self.0[1]), f(&self.0[2])])
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn dealias(&self) -> Self {
        self.map(ScalarField::dealias)
    }

    /// `Σ c_i T_i` componentwise.
    pub fn linear_combination(terms: &[(f64, &FieldTriple)]) -> Self {
        let comp = |p: usize| {
            let parts: Vec<(f64, &ScalarField)> = terms.iter().map(|(c, t)| (*c, &t.0[p])).collect();
            ScalarField::linear_combination(&parts).expect("triples share a grid")
        };
        Self([comp(0), comp(1), comp(2)])
    }

    /// Largest absolute value over components and grid points.
    pub fn max_abs(&self) -> f64 {
        self.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }

    /// Largest pointwise Euclidean length `|(a, b, c)(x)|`.
    pub fn max_pointwise_norm(&self) -> f64 {
        let [a, b, c] = &self.0;
        let (a, b, c) = (a.physical(), b.physical(), c.physical());
        a.iter()
            .zip(b.iter())
            .zip(c.iter())
            .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
            .fold(0.0, f64::max)
    }

    /// `(Σ_p ‖T_p‖²_{L²})^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(ScalarField::is_finite)
    }

    pub fn partial(&self, axis: usize) -> Self {
        self.map(|f| f.partial(axis))
    }
}

impl Index<usize> for FieldTriple {
    type Output = ScalarField;
    fn index(&self, i: usize) -> &ScalarField {
        &self.0[i]
    }
}

impl Add for &FieldTriple {
    type Output = FieldTriple;
    fn add(self, rhs: &FieldTriple) -> FieldTriple {
        FieldTriple::linear_combination(&[(1.0, self), (1.0, rhs)])
    }
}

impl Sub for &FieldTriple {
    type Output = FieldTriple;
    fn sub(self, rhs: &FieldTriple) -> FieldTriple {
        FieldTriple::linear_combination(&[(1.0, self), (-1.0, rhs)])
    }
}

/// Height perturbation `ρ = h − 1` and velocity `u`.
#[derive(Debug, Clone)]
pub struct PrimitiveState {
    pub rho: ScalarField,
    pub u: VectorField,
    pub time: f64,
}

/// Symmetrized variables `m = 2(√(1+ρ) − 1)` and `u`.
#[derive(Debug, Clone)]
pub struct SymState {
    pub m: ScalarField,
    pub u: VectorField,
    pub time: f64,
}

/// `U = (m, u1, u2)` together with `∂tU`.
#[derive(Debug, Clone)]
pub struct KGState {
    pub u: FieldTriple,
    pub ut: FieldTriple,
    pub time: f64,
}

impl PrimitiveState {
    pub fn new(rho: ScalarField, u: VectorField, time: f64) -> Result<Self, SpectralError> {
        rho.grid().check_same(u.grid())?;
        Ok(Self { rho, u, time })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            rho: ScalarField::zeros(grid),
            u: VectorField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    pub fn to_triple(&self) -> FieldTriple {
        FieldTriple([self.rho.clone(), self.u.u1.clone(), self.u.u2.clone()])
    }

    pub fn from_triple(t: FieldTriple, time: f64) -> Self {
        let [rho, u1, u2] = t.0;
        Self {
            rho,
            u: VectorField { u1, u2 },
            time,
        }
    }

    /// Smallest value of the total depth `1 + ρ`.
    pub fn min_depth(&self) -> f64 {
        1.0 + self.rho.min()
    }

    pub fn check_admissible(&self) -> Result<(), ModelError> {
        let min_depth = self.min_depth();
        if min_depth > 0.0 {
            Ok(())
        } else {
            Err(ModelError::Vacuum { min_depth })
        }
    }

    pub fn to_sym(&self) -> Result<SymState, ModelError> {
        Ok(SymState {
            m: super::rho_to_m(&self.rho)?,
            u: self.u.clone(),
            time: self.time,
        })
    }
}

impl SymState {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            m: ScalarField::zeros(grid),
            u: VectorField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.m.grid()
    }

    pub fn to_triple(&self) -> FieldTriple {
        FieldTriple([self.m.clone(), self.u.u1.clone(), self.u.u2.clone()])
    }

    pub fn from_triple(t: FieldTriple, time: f64) -> Self {
        let [m, u1, u2] = t.0;
        Self {
            m,
            u: VectorField { u1, u2 },
            time,
        }
    }

    pub fn to_primitive(&self) -> PrimitiveState {
        PrimitiveState {
            rho: super::m_to_rho(&self.m),
            u: self.u.clone(),
            time: self.time,
        }
    }

    /// The image of `1 + ρ > 0` is `m > −2`.
    pub fn check_admissible(&self) -> Result<(), ModelError> {
        let min_m = self.m.min();
        if min_m > -2.0 {
            Ok(())
        } else {
            Err(ModelError::Vacuum {
                min_depth: (1.0 + 0.5 * min_m).powi(2).copysign(1.0 + 0.5 * min_m),
            })
        }
    }
}

/// Whether the quadratic terms of the system are active.
///
/// `Linear` drops every quadratic term, including those of the `ρ ↔ m` change of
/// variables, so both formulations collapse to `∂tU = 𝓛U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    #[default]
    Nonlinear,
    Linear,
}

impl Dynamics {
    pub fn to_sym(self, s: &PrimitiveState) -> Result<SymState, ModelError> {
        match self {
            Dynamics::Nonlinear => s.to_sym(),
            Dynamics::Linear => Ok(SymState {
                m: s.rho.clone(),
                u: s.u.clone(),
                time: s.time,
            }),
        }
    }

    pub fn to_primitive(self, s: &SymState) -> PrimitiveState {
        match self {
            Dynamics::Nonlinear => s.to_primitive(),
            Dynamics::Linear => PrimitiveState {
                rho: s.m.clone(),
                u: s.u.clone(),
                time: s.time,
            },
        }
    }

    /// `∂tU` of the symmetrized system.
    pub fn time_derivative(self, s: &SymState) -> FieldTriple {
        let u = s.to_triple();
        match self {
            Dynamics::Nonlinear => super::symmetrized_tendency(&u),
            Dynamics::Linear => super::linear_operator(&u),
        }
    }

    /// `[U, ∂tU, …, ∂t^order U]` computed from the evolution equation.
    pub fn time_derivatives(self, s: &SymState, order: usize) -> Vec<FieldTriple> {
        super::time_derivatives(&s.to_triple(), order, self)
    }
}
