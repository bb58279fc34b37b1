use std::time::Instant;

use rayon::prelude::*;
use rsw_core::diagnostics::{error_ode_bound, linear_fit, weighted_norm_triple, NormSpec};
use rsw_core::integrate::Termination;
use rsw_core::rsw::{make_initial_data, project_zero_rv, PrimitiveState};
use serde::Serialize;

use super::simulate::{records_table, run_simulation, SimulationRun};
use super::{RunOptions, SummaryHeader};
use crate::config::{ExperimentConfig, OutputFormat};
use crate::output::{emit_plots, fmt_num, write_json, CsvTable, PlotEntry};
use crate::ExperimentError;

/// How the lifespan of one sweep member was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LifespanKind {
    /// `e(t)` crossed the threshold.
    Crossed,
    /// The full solution broke down before crossing.
    Blowup,
    Vacuum,
    /// Neither happened before the end of the run; the lifespan is a lower bound.
    Censored,
}

#[derive(Debug, Clone, Serialize)]
pub struct LifespanRow {
    pub epsilon: f64,
    /// `e(0) = ‖U(0) − U^K(0)‖_{H³}`.
    pub e0: f64,
    pub e0_over_epsilon: f64,
    /// `T(ε)`, absent when censored.
    pub lifespan: Option<f64>,
    /// `T(ε)` when finite, otherwise the last time `e(t)` was observed.
    pub lower_bound: f64,
    pub kind: LifespanKind,
    /// `C` for which the error-ODE bound crosses the threshold exactly at `lower_bound`.
    pub ode_constant: Option<f64>,
    pub max_error_ratio: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub std_error: f64,
    /// `slope ± 2·std_error`.
    pub band: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    #[serde(flatten)]
    pub header: SummaryHeader,
    pub delta: f64,
    pub threshold_factor: f64,
    /// Sorted by increasing ε.
    pub rows: Vec<LifespanRow>,
    /// Fit of `log T` against `log ε`; present with at least three finite lifespans.
    pub fit: Option<SlopeFit>,
    /// `C2` solving `slope = −1/(1 + C2 δ)`.
    pub c2_from_slope: Option<f64>,
    /// Median of the per-row error-ODE constants.
    pub ode_constant: Option<f64>,
    /// `−1/(1 + C δ)` with the median error-ODE constant.
    pub predicted_slope: Option<f64>,
    /// `max(e0/ε) / min(e0/ε)` across the sweep.
    pub e0_ratio_spread: f64,
    pub censored: bool,
    pub warnings: Vec<String>,
}

fn validate_epsilons(eps: &[f64]) -> Result<Vec<f64>, ExperimentError> {
    if eps.is_empty() {
        return Err(ExperimentError::Sweep("the epsilon list is empty".into()));
    }
    if let Some(e) = eps.iter().find(|&&e| e == 0.0) {
        return Err(ExperimentError::Sweep(format!(
            "epsilon = {e} is not allowed: with zero relative vorticity the error stays zero and never crosses the threshold"
        )));
    }
    if let Some(e) = eps.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(ExperimentError::Sweep(format!("epsilon values must be positive, got {e}")));
    }
    let mut sorted = eps.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ExperimentError::Sweep("epsilon values must be distinct".into()));
    }
    let span = sorted[sorted.len() - 1] / sorted[0];
    if span < 10.0 * (1.0 - 1e-9) {
        return Err(ExperimentError::Sweep(format!(
            "epsilon values must span at least one decade, got a ratio of {span}"
        )));
    }
    Ok(sorted)
}

/// `H³` distance between two primitive states.
fn h3_distance(a: &PrimitiveState, b: &PrimitiveState) -> f64 {
    weighted_norm_triple(&(&a.to_triple() - &b.to_triple()), &NormSpec::sobolev(3.0))
}

/// Error series `(t, e(t))` over the checkpoints both runs reached.
pub fn error_series(full: &SimulationRun, companion: &SimulationRun) -> Vec<(f64, f64)> {
    full.trajectory
        .checkpoints
        .iter()
        .zip(&companion.trajectory.checkpoints)
        .map(|(a, b)| (a.time, h3_distance(a, b)))
        .collect()
}

/// First time `e` reaches `threshold`, linearly interpolated between checkpoints.
pub fn first_crossing(series: &[(f64, f64)], threshold: f64) -> Option<f64> {
    let i = series.iter().position(|&(_, e)| e >= threshold)?;
    if i == 0 {
        return Some(series[0].0);
    }
    let (t0, e0) = series[i - 1];
    let (t1, e1) = series[i];
    Some(t0 + (threshold - e0) / (e1 - e0) * (t1 - t0))
}

/// `C` such that the closed-form error bound first reaches `factor · e0` at `t`.
pub fn fit_ode_constant(delta: f64, e0: f64, factor: f64, t: f64) -> Option<f64> {
    if !(t > 0.0 && e0 > 0.0) {
        return None;
    }
    let reached = |c: f64| {
        let b = error_ode_bound(c, delta, e0, t);
        b.blown_up || b.value >= factor * e0
    };
    let (mut lo, mut hi) = (1e-12_f64, 1e12_f64);
    if reached(lo) || !reached(hi) {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if reached(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo < 1.0 + 1e-13 {
            break;
        }
    }
    Some((lo * hi).sqrt())
}

fn row_for(
    epsilon: f64,
    series: &[(f64, f64)],
    termination: Termination,
    delta: f64,
    factor: f64,
) -> LifespanRow {
    let e0 = series[0].1;
    let last = series.last().map_or(0.0, |s| s.0);
    let (lifespan, kind) = match first_crossing(series, factor * e0) {
        Some(t) => (Some(t), LifespanKind::Crossed),
        None => match termination {
            Termination::Blowup { time } => (Some(time), LifespanKind::Blowup),
            Termination::Vacuum { time } => (Some(time), LifespanKind::Vacuum),
            Termination::Completed => (None, LifespanKind::Censored),
        },
    };
    let lower_bound = lifespan.unwrap_or(last);
    LifespanRow {
        epsilon,
        e0,
        e0_over_epsilon: e0 / epsilon,
        lifespan,
        lower_bound,
        kind,
        ode_constant: fit_ode_constant(delta, e0, factor, lower_bound),
        max_error_ratio: series.iter().map(|s| s.1 / e0).fold(0.0, f64::max),
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Assembles the sweep summary from per-ε rows.
pub fn summarize(rows: Vec<LifespanRow>, delta: f64, factor: f64, header: SummaryHeader) -> SweepResult {
    let finite: Vec<&LifespanRow> = rows.iter().filter(|r| r.lifespan.is_some()).collect();
    let fit = if finite.len() >= 3 {
        let xs: Vec<f64> = finite.iter().map(|r| r.epsilon.ln()).collect();
        let ys: Vec<f64> = finite.iter().map(|r| r.lifespan.unwrap().ln()).collect();
        linear_fit(&xs, &ys).map(|(a, b, se)| SlopeFit {
            slope: b,
            intercept: a,
            std_error: se,
            band: (b - 2.0 * se, b + 2.0 * se),
        })
    } else {
        None
    };
    let c2_from_slope = fit
        .filter(|f| f.slope < 0.0 && delta > 0.0)
        .map(|f| (-1.0 / f.slope - 1.0) / delta);
    let ode_constant = median(finite.iter().filter_map(|r| r.ode_constant).collect());
    let ratios: Vec<f64> = rows.iter().map(|r| r.e0_over_epsilon).collect();
    let e0_ratio_spread = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        / ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let censored = rows.iter().any(|r| r.kind == LifespanKind::Censored);
    let mut warnings = Vec::new();
    if finite.is_empty() {
        warnings.push(format!(
            "censored sweep: no run crossed {factor}·e(0) before t = {}; lifespans recorded as lower bounds",
            rows.iter().map(|r| r.lower_bound).fold(f64::INFINITY, f64::min)
        ));
    } else if censored {
        warnings.push("some lifespans are censored and excluded from the slope fit".into());
    }
    if fit.is_none() {
        warnings.push(format!("slope not fitted: {} finite lifespans, need 3", finite.len()));
    }
    SweepResult {
        header,
        delta,
        threshold_factor: factor,
        rows,
        fit,
        c2_from_slope,
        ode_constant,
        predicted_slope: ode_constant.map(|c| -1.0 / (1.0 + c * delta)),
        e0_ratio_spread,
        censored,
        warnings,
    }
}

pub fn cmd_lifespan(cfg: &ExperimentConfig, opts: RunOptions) -> Result<SweepResult, ExperimentError> {
    let start = Instant::now();
    let epsilons = validate_epsilons(&cfg.diagnostics.lifespan.epsilons)?;
    let grid = cfg.grid()?;
    let d = &cfg.data;
    let profile = cfg.profile();
    let dynamics = opts.dynamics();
    let factor = cfg.diagnostics.lifespan.threshold_factor;
    let (companion_data, _) = project_zero_rv(&make_initial_data(&grid, d.delta, 0.0, &profile, d.seed)?);
    let full_data = epsilons
        .iter()
        .map(|&e| make_initial_data(&grid, d.delta, e, &profile, d.seed))
        .collect::<Result<Vec<_>, _>>()?;

    let mut jobs: Vec<&PrimitiveState> = vec![&companion_data];
    jobs.extend(full_data.iter());
    let mut runs = jobs
        .par_iter()
        .map(|s| run_simulation(cfg, s, dynamics))
        .collect::<Result<Vec<_>, _>>()?;
    let companion = runs.remove(0);

    let dir = &cfg.output.directory;
    let want_csv = cfg.output.wants(OutputFormat::Csv);
    let mut rows = Vec::new();
    let mut plots = Vec::new();
    for (i, (run, &eps)) in runs.iter().zip(&epsilons).enumerate() {
        let series = error_series(run, &companion);
        if want_csv {
            let e: Vec<f64> = series.iter().map(|s| s.1).collect();
            let n = e.len();
            records_table(&run.records[..n], Some(&e)).write(dir, &format!("lifespan_run{i}.csv"))?;
            plots.push((
                PlotEntry {
                    file: format!("plot_error_run{i}.csv"),
                    x: "time".into(),
                    y: "h3_E".into(),
                    description: format!("H3 distance to the zero-relative-vorticity solution, epsilon = {eps}"),
                },
                series.clone(),
            ));
        }
        rows.push(row_for(eps, &series, run.trajectory.termination, d.delta, factor));
    }
    let worst = runs
        .iter()
        .map(|r| r.trajectory.termination)
        .find(|t| !t.is_completed())
        .unwrap_or(companion.trajectory.termination);
    let header = SummaryHeader {
        command: "lifespan",
        termination: worst,
        t_final: runs.iter().map(|r| r.trajectory.final_time()).fold(f64::INFINITY, f64::min),
        dynamics,
        config_hash: cfg.hash(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    let result = summarize(rows, d.delta, factor, header);
    if want_csv {
        records_table(&companion.records, None).write(dir, "lifespan_companion.csv")?;
        let mut t = CsvTable::new([
            "epsilon",
            "e0",
            "e0_over_epsilon",
            "lifespan",
            "lower_bound",
            "kind",
            "ode_constant",
        ]);
        for r in &result.rows {
            t.push(vec![
                fmt_num(r.epsilon),
                fmt_num(r.e0),
                fmt_num(r.e0_over_epsilon),
                r.lifespan.map_or_else(String::new, fmt_num),
                fmt_num(r.lower_bound),
                serde_json::to_value(r.kind).unwrap().as_str().unwrap().to_string(),
                r.ode_constant.map_or_else(String::new, fmt_num),
            ]);
        }
        t.write(dir, "lifespan.csv")?;
        plots.push((
            PlotEntry {
                file: "plot_lifespan.csv".into(),
                x: "epsilon".into(),
                y: "lifespan_lower_bound".into(),
                description: "lifespan (or its lower bound when censored) against epsilon".into(),
            },
            result.rows.iter().map(|r| (r.epsilon, r.lower_bound)).collect(),
        ));
        emit_plots(dir, &plots)?;
    }
    if cfg.output.wants(OutputFormat::Json) {
        write_json(dir, "lifespan.json", &result)?;
    }
    Ok(result)
}
