use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use ndarray::{Array2, Zip};
use rustfft::num_complex::Complex64;

use super::{Grid, SpectralError};

/// Which representations of a field are currently materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
    Both,
}

/// Real scalar field on a periodic grid.
///
/// A field is immutable. It is created from either physical samples or spectral
/// coefficients and lazily caches the other representation on first use. Spectral
/// coefficients are stored in FFT order with the `1/n²` normalization, so index
/// `[0, 0]` is the mean value.
#[derive(Clone)]
pub struct ScalarField {
    grid: Grid,
    physical: OnceLock<Array2<f64>>,
    spectral: OnceLock<Array2<Complex64>>,
}

impl ScalarField {
    pub fn from_physical(grid: &Grid, values: Array2<f64>) -> Self {
        let n = grid.n();
        assert_eq!(values.dim(), (n, n), "physical samples must be n x n");
        let physical = OnceLock::new();
        let _ = physical.set(values.as_standard_layout().into_owned());
        Self {
            grid: grid.clone(),
            physical,
            spectral: OnceLock::new(),
        }
    }

    /// Builds a field from spectral coefficients. The caller is responsible for
    /// conjugate symmetry; the physical representation keeps only the real part.
    pub fn from_spectral(grid: &Grid, coeffs: Array2<Complex64>) -> Self {
        let n = grid.n();
        assert_eq!(coeffs.dim(), (n, n), "spectral coefficients must be n x n");
        let spectral = OnceLock::new();
        let _ = spectral.set(coeffs.as_standard_layout().into_owned());
        Self {
            grid: grid.clone(),
            physical: OnceLock::new(),
            spectral,
        }
    }

    /// Samples `f(x1, x2)` at the absolute grid coordinates.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let values = Array2::from_shape_fn((n, n), |(i, j)| f(grid.coord(0, i), grid.coord(1, j)));
        Self::from_physical(grid, values)
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n();
        let field = Self::from_physical(grid, Array2::zeros((n, n)));
        let _ = field.spectral.set(Array2::zeros((n, n)));
        field
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let n = grid.n();
        Self::from_physical(grid, Array2::from_elem((n, n), value))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match (self.physical.get().is_some(), self.spectral.get().is_some()) {
            (true, true) => Representation::Both,
            (true, false) => Representation::Physical,
            _ => Representation::Spectral,
        }
    }

    pub fn physical(&self) -> &Array2<f64> {
        self.physical.get_or_init(|| {
            let coeffs = self.spectral.get().expect("field has no representation");
            self.grid.fft().inverse(coeffs)
        })
    }

    pub fn spectral(&self) -> &Array2<Complex64> {
        self.spectral.get_or_init(|| {
            let values = self.physical.get().expect("field has no representation");
            self.grid.fft().forward(values)
        })
    }

    pub fn map_physical(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_physical(&self.grid, self.physical().mapv(f))
    }

    pub fn zip_physical(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, SpectralError> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.physical().clone();
        Zip::from(&mut out).and(other.physical()).for_each(|a, &b| *a = f(*a, b));
        Ok(Self::from_physical(&self.grid, out))
    }

    pub(crate) fn map_spectral_indexed(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let mut coeffs = self.spectral().clone();
        coeffs.indexed_iter_mut().for_each(|((i, j), c)| *c = f(i, j, *c));
        Self::from_spectral(&self.grid, coeffs)
    }

    /// `Σ c_i f_i`, evaluated in a representation all inputs already share
    /// (spectral preferred).
    pub fn linear_combination(terms: &[(f64, &ScalarField)]) -> Result<Self, SpectralError> {
        let (_, first) = terms.first().expect("empty linear combination");
        let grid = first.grid.clone();
        for (_, f) in terms {
            grid.check_same(&f.grid)?;
        }
        let all_spectral = terms.iter().all(|(_, f)| f.spectral.get().is_some());
        let all_physical = terms.iter().all(|(_, f)| f.physical.get().is_some());
        if all_physical && !all_spectral {
            let mut out = first.physical() * terms[0].0;
            for (c, f) in &terms[1..] {
                out.scaled_add(*c, f.physical());
            }
            Ok(Self::from_physical(&grid, out))
        } else {
            let mut out = first.spectral() * Complex64::new(terms[0].0, 0.0);
            for (c, f) in &terms[1..] {
                Zip::from(&mut out).and(f.spectral()).for_each(|a, &b| *a += b * *c);
            }
            Ok(Self::from_spectral(&grid, out))
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        if let Some(s) = self.spectral.get() {
            Self::from_spectral(&self.grid, s * Complex64::new(c, 0.0))
        } else {
            Self::from_physical(&self.grid, self.physical() * c)
        }
    }

    /// Maximum absolute value over grid points.
    pub fn max_abs(&self) -> f64 {
        self.physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.physical().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        match self.spectral.get() {
            Some(s) if self.physical.get().is_none() => s.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            _ => self.physical().iter().all(|v| v.is_finite()),
        }
    }

    /// Discrete `∫ f dx` with quadrature weight `h²`.
    pub fn integral(&self) -> f64 {
        let h = self.grid.h();
        self.physical().iter().sum::<f64>() * h * h
    }

    /// The zero spectral coefficient, i.e. the spatial mean.
    pub fn mean(&self) -> f64 {
        self.spectral()[[0, 0]].re
    }

    /// Discrete L² norm by physical quadrature.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.h();
        (self.physical().iter().map(|v| v * v).sum::<f64>()).sqrt() * h
    }

    /// Discrete L² norm by Parseval, `L · (Σ |ĉ_k|²)^{1/2}`.
    pub fn l2_norm_spectral(&self) -> f64 {
        let s: f64 = self.spectral().iter().map(|c| c.norm_sqr()).sum();
        s.sqrt() * self.grid.box_length()
    }

    /// Discrete L² inner product by physical quadrature.
    pub fn inner(&self, other: &Self) -> Result<f64, SpectralError> {
        self.grid.check_same(&other.grid)?;
        let h = self.grid.h();
        let dot: f64 = self.physical().iter().zip(other.physical().iter()).map(|(a, b)| a * b).sum();
        Ok(dot * h * h)
    }

    /// Largest `|ĉ(−k) − conj(ĉ(k))|`; zero for a real field.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.grid.n();
        let c = self.spectral();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mirror = c[[(n - i) % n, (n - j) % n]];
                worst = worst.max((mirror - c[[i, j]].conj()).norm());
            }
        }
        worst
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("representation", &self.representation())
            .finish()
    }
}

fn combine(a: &ScalarField, b: &ScalarField, sign: f64) -> ScalarField {
    ScalarField::linear_combination(&[(1.0, a), (sign, b)])
        .unwrap_or_else(|_| panic!("field arithmetic on mismatched grids"))
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        combine(self, rhs, -1.0)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// Two-component vector field sharing one grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub u1: ScalarField,
    pub u2: ScalarField,
}

impl VectorField {
    pub fn new(u1: ScalarField, u2: ScalarField) -> Result<Self, SpectralError> {
        u1.grid().check_same(u2.grid())?;
        Ok(Self { u1, u2 })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            u1: ScalarField::zeros(grid),
            u2: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u1.grid()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            u1: self.u1.scale(c),
            u2: self.u2.scale(c),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.u1.max_abs().max(self.u2.max_abs())
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField {
            u1: &self.u1 + &rhs.u1,
            u2: &self.u2 + &rhs.u2,
        }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField {
            u1: &self.u1 - &rhs.u1,
            u2: &self.u2 - &rhs.u2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_is_tight() {
        let grid = make_grid(32, 2.0 * PI, 2.0 / 3.0).unwrap();
        let f = ScalarField::from_fn(&grid, |x, y| (x.sin() * 3.0 + (2.0 * y).cos()).exp());
        let back = ScalarField::from_spectral(&grid, f.spectral().clone());
        let scale = f.max_abs();
        let err = (&back - &f).max_abs();
        assert!(err <= 1e-12 * scale, "{err}");
        assert!(f.conjugate_symmetry_defect() < 1e-14 * scale);
    }

    #[test]
    fn mean_and_integral_agree() {
        let grid = make_grid(16, 3.0, 2.0 / 3.0).unwrap();
        let f = ScalarField::from_fn(&grid, |x, _| 2.0 + (2.0 * PI * x / 3.0).sin());
        assert!((f.mean() - 2.0).abs() < 1e-14);
        assert!((f.integral() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn lazy_representations() {
        let grid = make_grid(8, 1.0, 1.0).unwrap();
        let f = ScalarField::constant(&grid, 1.0);
        assert_eq!(f.representation(), Representation::Physical);
        let _ = f.spectral();
        assert_eq!(f.representation(), Representation::Both);
        assert_eq!(ScalarField::zeros(&grid).representation(), Representation::Both);
    }
}
