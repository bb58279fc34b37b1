use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Grids at least this large transform rows in parallel.
const PARALLEL_MIN_N: usize = 128;

/// Square 2D complex FFT built from row transforms and transposes.
///
/// The forward transform is normalized by `1/n²`, so the zero mode holds the mean.
pub(crate) struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn forward(&self, values: &Array2<f64>) -> Array2<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        let scale = 1.0 / (self.n * self.n) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Array2::from_shape_vec((self.n, self.n), data).expect("square buffer")
    }

    pub(crate) fn inverse(&self, coeffs: &Array2<Complex64>) -> Array2<f64> {
        let mut data: Vec<Complex64> = coeffs.iter().copied().collect();
        self.transform(&mut data, &self.inverse);
        Array2::from_shape_vec((self.n, self.n), data.into_iter().map(|c| c.re).collect())
            .expect("square buffer")
    }

    fn transform(&self, data: &mut Vec<Complex64>, plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        self.rows(data, plan);
        let mut t = transpose(data, n);
        self.rows(&mut t, plan);
        *data = transpose(&t, n);
    }

    fn rows(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let scratch_len = plan.get_inplace_scratch_len();
        if n >= PARALLEL_MIN_N {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex64::default(); scratch_len],
                |scratch, row| plan.process_with_scratch(row, scratch),
            );
        } else {
            let mut scratch = vec![Complex64::default(); scratch_len];
            plan.process_with_scratch(data, &mut scratch);
        }
    }
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    const BLOCK: usize = 32;
    let mut out = vec![Complex64::default(); n * n];
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    out[j * n + i] = data[i * n + j];
                }
            }
        }
    }
    out
}
