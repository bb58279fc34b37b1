use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Grid, ScalarField};

/// Random real field whose spectrum lives inside the dealiased band.
pub(crate) fn random_band_limited(grid: &Grid, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let values = Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0));
    ScalarField::from_physical(grid, values).dealias()
}

/// Smooth random field: a few Gaussian bumps with random centers and signs.
pub(crate) fn random_smooth(grid: &Grid, seed: u64, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.1 * grid.box_length();
    let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(-1.0..1.0),
                rng.random_range(-half..half),
                rng.random_range(-half..half),
                rng.random_range(0.05..0.07) * grid.box_length(),
            )
        })
        .collect();
    ScalarField::from_fn(grid, |x, y| {
        amplitude
            * bumps
                .iter()
                .map(|&(a, cx, cy, w)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (w * w)).exp())
                .sum::<f64>()
    })
    .dealias()
}

/// Centered isotropic Gaussian `exp(−|x|²/w²)`, dealiased.
pub(crate) fn gaussian(grid: &Grid, width: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| (-(x * x + y * y) / (width * width)).exp()).dealias()
}
