use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::fft::Fft2;
use super::SpectralError;

/// Geometry of a doubly periodic square box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per dimension.
    pub n: usize,
    /// Side length of the box.
    pub box_length: f64,
    /// Coordinates run over `[center - L/2, center + L/2)` in each dimension.
    pub center: [f64; 2],
    /// Modes with `max(|k1|, |k2|)` above this fraction of the Nyquist wavenumber are
    /// removed by dealiasing.
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64, dealias_fraction: f64) -> Self {
        Self {
            n,
            box_length,
            center: [0.0, 0.0],
            dealias_fraction,
        }
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(SpectralError::InvalidGrid(format!(
                "n must be even and at least 4, got {}",
                self.n
            )));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "box_length must be positive, got {}",
                self.box_length
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(SpectralError::InvalidGrid("center must be finite".into()));
        }
        Ok(())
    }

    /// Wavenumber spacing `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Physical grid spacing `L/n`.
    pub fn h(&self) -> f64 {
        self.box_length / self.n as f64
    }
}

/// Shared, immutable grid: geometry plus precomputed lattice, dealias mask and FFT plans.
///
/// Cloning is cheap (reference counted).
#[derive(Clone)]
pub struct Grid(Arc<GridInner>);

struct GridInner {
    spec: GridSpec,
    /// Lattice wavenumbers in FFT storage order.
    wavenumbers: Vec<f64>,
    /// Wavenumbers used by derivative operators: the Nyquist entry is zeroed so that
    /// odd-symbol operators map real fields to real fields.
    deriv_wavenumbers: Vec<f64>,
    keep: Vec<bool>,
    coords: Vec<f64>,
    fft: Fft2,
}

/// Builds a grid; `n` must be even and at least 4.
pub fn make_grid(n: usize, box_length: f64, dealias_fraction: f64) -> Result<Grid, SpectralError> {
    Grid::new(GridSpec::new(n, box_length, dealias_fraction))
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self, SpectralError> {
        spec.validate()?;
        let n = spec.n;
        let dk = spec.dk();
        let half = (n / 2) as i64;
        let index: Vec<i64> = (0..n as i64)
            .map(|j| if j < half { j } else { j - n as i64 })
            .collect();
        let wavenumbers: Vec<f64> = index.iter().map(|&j| j as f64 * dk).collect();
        let deriv_wavenumbers = index
            .iter()
            .map(|&j| if j == -half { 0.0 } else { j as f64 * dk })
            .collect();
        // Small slack so that e.g. 2/3 * 96 = 64 keeps mode 64 despite rounding.
        let cutoff = spec.dealias_fraction * half as f64 + 1e-9;
        let keep = index.iter().map(|&j| (j.abs() as f64) <= cutoff).collect();
        let h = spec.h();
        let coords = (0..n).map(|i| -0.5 * spec.box_length + i as f64 * h).collect();
        Ok(Grid(Arc::new(GridInner {
            spec,
            wavenumbers,
            deriv_wavenumbers,
            keep,
            coords,
            fft: Fft2::new(n),
        })))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.0.spec
    }

    pub fn n(&self) -> usize {
        self.0.spec.n
    }

    pub fn box_length(&self) -> f64 {
        self.0.spec.box_length
    }

    pub fn h(&self) -> f64 {
        self.0.spec.h()
    }

    /// Per-dimension wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.0.wavenumbers
    }

    /// Per-dimension wavenumbers in ascending order: `2π/L · j` for `j ∈ [-n/2, n/2)`.
    pub fn wavenumber_lattice(&self) -> Vec<f64> {
        let mut k = self.0.wavenumbers.clone();
        k.sort_by(|a, b| a.total_cmp(b));
        k
    }

    pub(crate) fn deriv_wavenumbers(&self) -> &[f64] {
        &self.0.deriv_wavenumbers
    }

    /// Whether storage index `i` (either dimension) survives dealiasing.
    pub fn keeps(&self, i: usize) -> bool {
        self.0.keep[i]
    }

    /// Largest `|k|` among modes that survive dealiasing.
    pub fn max_retained_wavenumber(&self) -> f64 {
        let kmax = self
            .0
            .wavenumbers
            .iter()
            .zip(&self.0.keep)
            .filter(|(_, &keep)| keep)
            .map(|(k, _)| k.abs())
            .fold(0.0, f64::max);
        kmax * std::f64::consts::SQRT_2
    }

    /// Coordinates relative to the box center, `[-L/2, L/2)`, per dimension.
    pub fn centered_coords(&self) -> &[f64] {
        &self.0.coords
    }

    /// Absolute physical coordinate of storage index `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.0.spec.center[axis] + self.0.coords[i]
    }

    pub(crate) fn fft(&self) -> &Fft2 {
        &self.0.fft
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<(), SpectralError> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch)
        }
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Grid").field(&self.0.spec).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_spacing_lattice() {
        let grid = make_grid(4, 2.0 * PI, 2.0 / 3.0).unwrap();
        let k = grid.wavenumber_lattice();
        let expected = [-2.0, -1.0, 0.0, 1.0];
        for (a, b) in k.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{k:?}");
        }
    }

    #[test]
    fn half_spacing_lattice() {
        let grid = make_grid(64, 4.0 * PI, 2.0 / 3.0).unwrap();
        let k = grid.wavenumber_lattice();
        assert_eq!(k.len(), 64);
        for w in k.windows(2) {
            assert!((w[1] - w[0] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(matches!(make_grid(5, 1.0, 0.5), Err(SpectralError::InvalidGrid(_))));
        assert!(matches!(make_grid(2, 1.0, 0.5), Err(SpectralError::InvalidGrid(_))));
        assert!(matches!(make_grid(8, 0.0, 0.5), Err(SpectralError::InvalidGrid(_))));
        assert!(matches!(make_grid(8, -1.0, 0.5), Err(SpectralError::InvalidGrid(_))));
        assert!(matches!(make_grid(8, 1.0, 0.0), Err(SpectralError::InvalidGrid(_))));
        assert!(matches!(make_grid(8, 1.0, 1.5), Err(SpectralError::InvalidGrid(_))));
    }

    #[test]
    fn mask_is_symmetric() {
        let grid = make_grid(24, 3.0, 2.0 / 3.0).unwrap();
        let n = grid.n();
        for i in 1..n {
            assert_eq!(grid.keeps(i), grid.keeps(n - i), "index {i}");
        }
        // Nyquist is always cut below fraction 1.
        assert!(!grid.keeps(n / 2));
        assert!(grid.keeps(8) && !grid.keeps(9));
    }
}
