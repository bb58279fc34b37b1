use rsw_core::diagnostics::{fit_decay, weighted_norm_triple, FitResult, NormSpec};
use rsw_core::integrate::Trajectory;
use rsw_core::rsw::project_zero_rv;
use serde::Serialize;

use super::simulate::{auto_window, check_window, initial_state, run_simulation, write_simulation};
use super::{RunOptions, SummaryHeader};
use crate::config::{ExperimentConfig, OutputFormat};
use crate::output::{emit_plots, write_json, CsvTable, PlotEntry};
use crate::ExperimentError;

/// `max_x |U(t, x)|` at every checkpoint.
pub fn sup_series(traj: &Trajectory) -> Result<Vec<(f64, f64)>, ExperimentError> {
    Ok(traj
        .sym_states()?
        .iter()
        .map(|s| (s.time, s.to_triple().max_pointwise_norm()))
        .collect())
}

/// Fits the sup-norm decay of a trajectory over `window`.
pub fn decay_analysis(traj: &Trajectory, window: (f64, f64)) -> Result<(Vec<(f64, f64)>, FitResult), ExperimentError> {
    check_window(&traj.times(), window)?;
    let series = sup_series(traj)?;
    let fit = fit_decay(&series, window)?;
    Ok((series, fit))
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    #[serde(flatten)]
    pub header: SummaryHeader,
    pub fit: FitResult,
    /// `H³` norm of the relative-vorticity part removed from the configured data.
    pub discarded_h3: f64,
    /// `max_t (1 + t) · max_x |U|` over the fit window.
    pub max_weighted_sup: f64,
}

pub fn cmd_decay(cfg: &ExperimentConfig, opts: RunOptions) -> Result<DecayReport, ExperimentError> {
    let (initial, discarded) = project_zero_rv(&initial_state(cfg)?);
    let discarded_h3 = weighted_norm_triple(&discarded.to_triple(), &NormSpec::sobolev(3.0));
    let run = run_simulation(cfg, &initial, opts.dynamics())?;
    write_simulation(cfg, &run, "decay_run", None)?;
    let window = auto_window(cfg, &initial, run.trajectory.final_time())?;
    let (series, fit) = decay_analysis(&run.trajectory, window)?;
    let weighted: Vec<(f64, f64)> = series.iter().map(|&(t, v)| (t, (1.0 + t) * v)).collect();
    let report = DecayReport {
        header: SummaryHeader {
            command: "decay",
            termination: run.trajectory.termination,
            t_final: run.trajectory.final_time(),
            dynamics: opts.dynamics(),
            config_hash: cfg.hash(),
            runtime_seconds: run.runtime_seconds,
        },
        fit,
        discarded_h3,
        max_weighted_sup: weighted
            .iter()
            .filter(|(t, _)| *t >= window.0 && *t <= window.1)
            .map(|&(_, v)| v)
            .fold(0.0, f64::max),
    };
    let dir = &cfg.output.directory;
    if cfg.output.wants(OutputFormat::Csv) {
        let mut t = CsvTable::new(["time", "sup_norm", "weighted_sup_norm", "in_window"]);
        for (&(time, v), &(_, w)) in series.iter().zip(&weighted) {
            let inside = if time >= window.0 - 1e-12 && time <= window.1 + 1e-12 { 1.0 } else { 0.0 };
            t.push_numbers(&[time, v, w, inside]);
        }
        t.write(dir, "decay.csv")?;
        let fitted: Vec<(f64, f64)> = series
            .iter()
            .map(|&(t, _)| (t, fit.prefactor * (1.0 + t).powf(-fit.exponent)))
            .collect();
        emit_plots(
            dir,
            &[
                (
                    PlotEntry {
                        file: "plot_decay.csv".into(),
                        x: "time".into(),
                        y: "sup_norm".into(),
                        description: "max-norm of U against time".into(),
                    },
                    series,
                ),
                (
                    PlotEntry {
                        file: "plot_decay_fit.csv".into(),
                        x: "time".into(),
                        y: "fitted_sup_norm".into(),
                        description: "fitted power law prefactor (1+t)^-exponent".into(),
                    },
                    fitted,
                ),
            ],
        )?;
    }
    if cfg.output.wants(OutputFormat::Json) {
        write_json(dir, "decay.json", &report)?;
    }
    Ok(report)
}
