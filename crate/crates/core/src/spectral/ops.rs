//! Fourier multipliers, differential operators and dealiasing.
//!
//! Differential operators use the lattice wavenumbers with the Nyquist entry zeroed,
//! and `laplacian` is built from the same wavenumbers so that `div ∘ grad` equals
//! `laplacian` on every mode.

use rustfft::num_complex::Complex64;

use super::{ScalarField, SpectralError, VectorField};

impl ScalarField {
    /// Multiplies spectral coefficients by a real `symbol(k1, k2)` evaluated on the lattice.
    pub fn fourier_multiplier(&self, symbol: impl Fn(f64, f64) -> f64) -> Result<Self, SpectralError> {
        let k = self.grid().wavenumbers();
        let n = self.grid().n();
        let mut values = Vec::with_capacity(n * n);
        for &k1 in k {
            for &k2 in k {
                let s = symbol(k1, k2);
                if !s.is_finite() {
                    return Err(SpectralError::SingularSymbol { k1, k2 });
                }
                values.push(s);
            }
        }
        Ok(self.map_spectral_indexed(|i, j, c| c * values[i * n + j]))
    }

    /// Like `fourier_multiplier` but evaluated on the derivative wavenumbers, whose
    /// Nyquist entry is zero. Operators built this way commute exactly with `partial`.
    pub(crate) fn derivative_multiplier(&self, symbol: impl Fn(f64, f64) -> f64) -> Self {
        let k = self.grid().deriv_wavenumbers();
        self.map_spectral_indexed(|i, j, c| c * symbol(k[i], k[j]))
    }

    /// `∂f/∂x_axis` for `axis ∈ {0, 1}`.
    pub fn partial(&self, axis: usize) -> Self {
        let k = self.grid().deriv_wavenumbers();
        match axis {
            0 => self.map_spectral_indexed(|i, _, c| c * Complex64::new(0.0, k[i])),
            1 => self.map_spectral_indexed(|_, j, c| c * Complex64::new(0.0, k[j])),
            _ => panic!("axis must be 0 or 1"),
        }
    }

    /// `∂²f/∂x_a∂x_b`.
    pub fn partial2(&self, a: usize, b: usize) -> Self {
        let k = self.grid().deriv_wavenumbers();
        let ka = |i: usize, j: usize, axis: usize| if axis == 0 { k[i] } else { k[j] };
        self.map_spectral_indexed(|i, j, c| c * (-ka(i, j, a) * ka(i, j, b)))
    }

    pub fn laplacian(&self) -> Self {
        let k = self.grid().deriv_wavenumbers();
        self.map_spectral_indexed(|i, j, c| c * (-(k[i] * k[i] + k[j] * k[j])))
    }

    /// `(Δ − 1)^{-1} f`; the symbol `−1/(1 + |k|²)` is finite everywhere.
    pub fn inverse_helmholtz(&self) -> Self {
        let k = self.grid().deriv_wavenumbers();
        self.map_spectral_indexed(|i, j, c| c * (-1.0 / (1.0 + k[i] * k[i] + k[j] * k[j])))
    }

    pub fn grad(&self) -> VectorField {
        VectorField {
            u1: self.partial(0),
            u2: self.partial(1),
        }
    }

    /// Zeroes every mode with `max(|k1|, |k2|)` above the dealiasing cutoff.
    pub fn dealias(&self) -> Self {
        let grid = self.grid().clone();
        self.map_spectral_indexed(|i, j, c| {
            if grid.keeps(i) && grid.keeps(j) {
                c
            } else {
                Complex64::default()
            }
        })
    }

    /// `‖(1 − Δ)^{l/2} f‖_{L²}` by Parseval.
    pub fn sobolev_norm(&self, l: f64) -> f64 {
        let k = self.grid().wavenumbers();
        let c = self.spectral();
        let mut sum = 0.0;
        for (i, k1) in k.iter().enumerate() {
            for (j, k2) in k.iter().enumerate() {
                sum += (1.0 + k1 * k1 + k2 * k2).powf(l) * c[[i, j]].norm_sqr();
            }
        }
        sum.sqrt() * self.grid().box_length()
    }

    /// Physical-space product `f·g`, optionally dealiased.
    pub fn product(&self, other: &Self, dealiased: bool) -> Result<Self, SpectralError> {
        pointwise_product(self, other, dealiased)
    }
}

pub fn grad(f: &ScalarField) -> VectorField {
    f.grad()
}

pub fn div(v: &VectorField) -> Result<ScalarField, SpectralError> {
    v.u1.grid().check_same(v.u2.grid())?;
    Ok(&v.u1.partial(0) + &v.u2.partial(1))
}

/// `∂1 v2 − ∂2 v1`.
pub fn curl(v: &VectorField) -> Result<ScalarField, SpectralError> {
    v.u1.grid().check_same(v.u2.grid())?;
    Ok(&v.u2.partial(0) - &v.u1.partial(1))
}

/// Pointwise rotation `(v1, v2) → (−v2, v1)`.
pub fn perp(v: &VectorField) -> VectorField {
    VectorField {
        u1: -&v.u2,
        u2: v.u1.clone(),
    }
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.laplacian()
}

pub fn dealias(f: &ScalarField) -> ScalarField {
    f.dealias()
}

pub fn fourier_multiplier(f: &ScalarField, symbol: impl Fn(f64, f64) -> f64) -> Result<ScalarField, SpectralError> {
    f.fourier_multiplier(symbol)
}

pub fn pointwise_product(f: &ScalarField, g: &ScalarField, dealiased: bool) -> Result<ScalarField, SpectralError> {
    let p = f.zip_physical(g, |a, b| a * b)?;
    Ok(if dealiased { p.dealias() } else { p })
}
