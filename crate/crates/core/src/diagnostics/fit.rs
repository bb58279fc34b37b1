use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} samples in the window, found {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("non-positive value {value} at t = {time}")]
    NonPositive { time: f64, value: f64 },
    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(f64, f64),
}

/// Power-law fit `value ≈ prefactor · (1 + t)^{−exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 5;

/// Least-squares fit of `log v = log prefactor − exponent · log(1 + t)` over samples
/// with `t` in the closed window.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult, FitError> {
    let (t0, t1) = window;
    if !(t0 < t1) {
        return Err(FitError::InvalidWindow(t0, t1));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= t0 - 1e-12 && t <= t1 + 1e-12)
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(FitError::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: pts.len(),
        });
    }
    if let Some(&(time, value)) = pts.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(FitError::NonPositive { time, value });
    }
    let xs: Vec<f64> = pts.iter().map(|&(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FitResult {
        exponent: -slope,
        prefactor: intercept.exp(),
        window,
        residual,
        samples: pts.len(),
    })
}

/// Ordinary least-squares line `y = a + b x` with the standard error of `b`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let se = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some((a, b, se))
}

/// Closed-form bound for `e' = C e (e + δ/(1+t))`, `e(0) = e0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeBound {
    pub value: f64,
    /// The bound has ceased to exist by time `t`; `value` is `+∞`.
    pub blown_up: bool,
}

/// `e(t) ≤ (1+t)^{Cδ} / (1/e0 − C/(1+Cδ)[(1+t)^{1+Cδ} − 1])`.
pub fn error_ode_bound(c: f64, delta: f64, e0: f64, t: f64) -> OdeBound {
    let cd = c * delta;
    let bracket = 1.0 / e0 - c / (1.0 + cd) * ((1.0 + t).powf(1.0 + cd) - 1.0);
    if bracket > 0.0 {
        OdeBound {
            value: (1.0 + t).powf(cd) / bracket,
            blown_up: false,
        }
    } else {
        OdeBound {
            value: f64::INFINITY,
            blown_up: true,
        }
    }
}

/// Root of the bracket: `((1 + Cδ)/(C e0) + 1)^{1/(1+Cδ)} − 1`.
pub fn ode_lifespan(c: f64, delta: f64, e0: f64) -> f64 {
    let cd = c * delta;
    ((1.0 + cd) / (c * e0) + 1.0).powf(1.0 / (1.0 + cd)) - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..=10).map(|i| i as f64).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_decay(&series(|t| 3.0 / (1.0 + t)), (0.0, 10.0)).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-12);
        assert!((fit.prefactor - 3.0).abs() < 1e-12);
        assert!(fit.residual <= 1e-12);
        let flat = fit_decay(&series(|_| 2.0), (0.0, 10.0)).unwrap();
        assert!(flat.exponent.abs() < 1e-14);
    }

    #[test]
    fn perturbed_power_law() {
        let fit = fit_decay(&series(|t| (1.0 + 0.05 * t.sin()) / (1.0 + t)), (0.0, 10.0)).unwrap();
        assert!((0.95..=1.05).contains(&fit.exponent), "{}", fit.exponent);
    }

    #[test]
    fn planted_exponents() {
        for p in [0.0, 0.5, 1.0, 2.0] {
            let fit = fit_decay(&series(|t| 0.7 * (1.0 + t).powf(-p)), (1.0, 10.0)).unwrap();
            assert!((fit.exponent - p).abs() <= 1e-10);
        }
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_decay(&series(|_| 0.0), (0.0, 10.0)), Err(FitError::NonPositive { .. })));
        assert!(matches!(
            fit_decay(&series(|t| 1.0 / (1.0 + t)), (0.0, 3.0)),
            Err(FitError::TooFewSamples { found: 4, .. })
        ));
    }

    #[test]
    fn ode_bound_special_cases() {
        assert!((error_ode_bound(1.0, 0.1, 0.01, 0.0).value - 0.01).abs() < 1e-16);
        let (c, e0, t) = (2.0, 0.05, 3.0);
        let b = error_ode_bound(c, 0.0, e0, t).value;
        assert!((b - e0 / (1.0 - c * e0 * t)).abs() < 1e-14);
        let life = ode_lifespan(1.0, 0.1, 0.01);
        assert!(!error_ode_bound(1.0, 0.1, 0.01, 0.999 * life).blown_up);
        assert!(error_ode_bound(1.0, 0.1, 0.01, 1.001 * life).blown_up);
    }

    #[test]
    fn ode_bound_matches_integration() {
        let (c, delta, e0) = (1.0, 0.1, 0.01);
        let f = |t: f64, e: f64| c * e * (e + delta / (1.0 + t));
        let t_end = 0.9 * ode_lifespan(c, delta, e0);
        let steps = 200_000;
        let h = t_end / steps as f64;
        let mut e = e0;
        let mut worst: f64 = 0.0;
        for i in 0..steps {
            let t = i as f64 * h;
            let k1 = f(t, e);
            let k2 = f(t + 0.5 * h, e + 0.5 * h * k1);
            let k3 = f(t + 0.5 * h, e + 0.5 * h * k2);
            let k4 = f(t + h, e + h * k3);
            e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (i + 1) % 1000 == 0 {
                let exact = error_ode_bound(c, delta, e0, t + h).value;
                worst = worst.max((e - exact).abs() / exact);
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    proptest! {
        #[test]
        fn fit_recovers_random_power_laws(p in 0.0f64..3.0, a in 0.1f64..10.0) {
            let fit = fit_decay(&series(|t| a * (1.0 + t).powf(-p)), (0.0, 10.0)).unwrap();
            prop_assert!((fit.exponent - p).abs() < 1e-10);
            prop_assert!((fit.prefactor - a).abs() < 1e-9 * a);
        }
    }
}
