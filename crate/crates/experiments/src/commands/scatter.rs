use rsw_core::diagnostics::{fit_decay, scattering_diagnostic, FitResult, ScatterRow};
use rsw_core::integrate::Trajectory;
use rsw_core::rsw::project_zero_rv;
use serde::Serialize;

use super::simulate::{auto_window, check_window, initial_state, run_simulation, write_simulation};
use super::{RunOptions, SummaryHeader};
use crate::config::{ExperimentConfig, OutputFormat};
use crate::output::{emit_plots, write_json, CsvTable, PlotEntry};
use crate::ExperimentError;

/// Differences at or below this level count as an exact match with the free flow.
pub const EXACT_MATCH_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ScatterAnalysis {
    pub t_star: f64,
    /// Checkpoints after `t*` up to the end of the window.
    pub window: (f64, f64),
    pub rows: Vec<ScatterRow>,
    /// Every difference is below [`EXACT_MATCH_TOLERANCE`]; the fit is skipped.
    pub exact_match: bool,
    pub fit: Option<FitResult>,
    /// `‖U − U⁺‖` never increases between consecutive samples after `t*`.
    pub non_increasing: bool,
    pub max_difference: f64,
}

/// Compares the trajectory with the free solution matched at `t_star` on the
/// checkpoints in `[t_star, window_end]`.
pub fn scatter_analysis(
    traj: &Trajectory,
    t_star: f64,
    window_end: f64,
    l: f64,
) -> Result<ScatterAnalysis, ExperimentError> {
    let samples: Vec<f64> = traj
        .times()
        .into_iter()
        .filter(|&t| t >= t_star - 1e-9 && t <= window_end + 1e-9)
        .collect();
    let rows = scattering_diagnostic(traj, t_star, &samples, l)?;
    let max_difference = rows.iter().map(|r| r.diff_u.max(r.diff_ut)).fold(0.0, f64::max);
    let exact_match = max_difference <= EXACT_MATCH_TOLERANCE;
    let after: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.time > t_star + 1e-9)
        .map(|r| (r.time, r.diff_u))
        .collect();
    let non_increasing = after.windows(2).all(|w| w[1].1 <= w[0].1);
    let window = (after.first().map_or(t_star, |r| r.0), window_end);
    let fit = if exact_match {
        None
    } else {
        check_window(&after.iter().map(|r| r.0).collect::<Vec<_>>(), window)?;
        Some(fit_decay(&after, window)?)
    };
    Ok(ScatterAnalysis {
        t_star,
        window,
        rows,
        exact_match,
        fit,
        non_increasing,
        max_difference,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatterReport {
    #[serde(flatten)]
    pub header: SummaryHeader,
    pub fit: Option<FitResult>,
    pub analysis: ScatterAnalysis,
}

pub fn cmd_scatter(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ScatterReport, ExperimentError> {
    let (initial, _) = project_zero_rv(&initial_state(cfg)?);
    let run = run_simulation(cfg, &initial, opts.dynamics())?;
    write_simulation(cfg, &run, "scatter_run", None)?;
    let t_star = cfg.diagnostics.scatter_time;
    let (_, window_end) = auto_window(cfg, &initial, run.trajectory.final_time())?;
    if t_star >= window_end {
        return Err(ExperimentError::Window(format!(
            "matching time {t_star} is not before the window end {window_end}; increase box_length or t_end"
        )));
    }
    let analysis = scatter_analysis(&run.trajectory, t_star, window_end, cfg.diagnostics.scatter_order)?;
    let report = ScatterReport {
        header: SummaryHeader {
            command: "scatter",
            termination: run.trajectory.termination,
            t_final: run.trajectory.final_time(),
            dynamics: opts.dynamics(),
            config_hash: cfg.hash(),
            runtime_seconds: run.runtime_seconds,
        },
        fit: analysis.fit,
        analysis,
    };
    let dir = &cfg.output.directory;
    if cfg.output.wants(OutputFormat::Csv) {
        let mut t = CsvTable::new(["time", "diff_U", "diff_Ut"]);
        for r in &report.analysis.rows {
            t.push_numbers(&[r.time, r.diff_u, r.diff_ut]);
        }
        t.write(dir, "scatter.csv")?;
        emit_plots(
            dir,
            &[(
                PlotEntry {
                    file: "plot_scatter.csv".into(),
                    x: "time".into(),
                    y: "diff_U".into(),
                    description: "distance to the free solution matched at t*".into(),
                },
                report.analysis.rows.iter().map(|r| (r.time, r.diff_u)).collect(),
            )],
        )?;
    }
    if cfg.output.wants(OutputFormat::Json) {
        write_json(dir, "scatter.json", &report)?;
    }
    Ok(report)
}
