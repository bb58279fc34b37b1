use std::time::Instant;

use rsw_core::diagnostics::{record, support_radius, DiagnosticsRecord, FitResult, SUPPORT_TOLERANCE};
use rsw_core::integrate::{integrate, Trajectory};
use rsw_core::rsw::{make_initial_data, Dynamics, PrimitiveState};
use serde::Serialize;

use super::{RunOptions, SummaryHeader};
use crate::config::{ExperimentConfig, OutputFormat};
use crate::output::{emit_plots, write_json, CsvTable, PlotEntry};
use crate::ExperimentError;

/// A finished integration together with its per-checkpoint diagnostics.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub trajectory: Trajectory,
    pub records: Vec<DiagnosticsRecord>,
    pub runtime_seconds: f64,
}

impl SimulationRun {
    pub fn series(&self, f: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.time, f(r))).collect()
    }
}

pub fn initial_state(cfg: &ExperimentConfig) -> Result<PrimitiveState, ExperimentError> {
    let d = &cfg.data;
    Ok(make_initial_data(&cfg.grid()?, d.delta, d.epsilon, &cfg.profile(), d.seed)?)
}

pub fn run_simulation(
    cfg: &ExperimentConfig,
    initial: &PrimitiveState,
    dynamics: Dynamics,
) -> Result<SimulationRun, ExperimentError> {
    let start = Instant::now();
    let trajectory = integrate(initial, &cfg.integrator_config(dynamics))?;
    let opts = cfg.record_options();
    let records = trajectory
        .sym_states()?
        .iter()
        .map(|s| record(s, dynamics, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimulationRun {
        trajectory,
        records,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Default fit window: from `t = 1` to the wrap-around time `L/2 − r0`, clipped to
/// the trajectory, where `r0` is the support radius of the initial data.
pub fn auto_window(
    cfg: &ExperimentConfig,
    initial: &PrimitiveState,
    t_final: f64,
) -> Result<(f64, f64), ExperimentError> {
    let w = cfg.diagnostics.fit_window;
    let t_min = w.t_min.unwrap_or(1.0);
    let t_max = w.t_max.unwrap_or_else(|| {
        let r0 = support_radius(&initial.to_triple(), SUPPORT_TOLERANCE);
        0.5 * cfg.grid.box_length - r0
    });
    let t_max = t_max.min(t_final);
    if !(t_min < t_max) {
        return Err(ExperimentError::Window(format!(
            "empty fit window [{t_min}, {t_max}]; increase box_length or t_end"
        )));
    }
    Ok((t_min, t_max))
}

/// Rejects windows holding fewer than five checkpoints.
pub fn check_window(times: &[f64], window: (f64, f64)) -> Result<(), ExperimentError> {
    let count = times
        .iter()
        .filter(|&&t| t >= window.0 - 1e-12 && t <= window.1 + 1e-12)
        .count();
    if count < rsw_core::diagnostics::MIN_FIT_SAMPLES {
        return Err(ExperimentError::Window(format!(
            "window [{}, {}] holds {count} checkpoints, need {}; use a larger box_length or a smaller checkpoint_interval",
            window.0,
            window.1,
            rsw_core::diagnostics::MIN_FIT_SAMPLES
        )));
    }
    Ok(())
}

pub const SIMULATE_COLUMNS: [&str; 8] = [
    "time",
    "sup_norm",
    "l2_U",
    "l2_dU",
    "theta_max",
    "theta_integral",
    "energy_F",
    "support_radius",
];

/// Per-checkpoint table; `h3_e` adds the lifespan error column after `l2_dU`.
pub fn records_table(records: &[DiagnosticsRecord], h3_e: Option<&[f64]>) -> CsvTable {
    let mut header: Vec<&str> = SIMULATE_COLUMNS.to_vec();
    if h3_e.is_some() {
        header.insert(4, "h3_E");
    }
    let mut t = CsvTable::new(header);
    for (i, r) in records.iter().enumerate() {
        let mut row = vec![r.time, r.sup_norm, r.l2_u, r.l2_du];
        if let Some(e) = h3_e {
            row.push(e[i]);
        }
        row.extend([r.theta_max, r.theta_integral, r.energy_f, r.support_radius]);
        t.push_numbers(&row);
    }
    t
}

/// Configured weighted norms and vector-field norms per checkpoint.
pub fn norms_table(records: &[DiagnosticsRecord]) -> CsvTable {
    let mut header = vec!["time".to_string()];
    if let Some(r) = records.first() {
        header.extend(r.l2_norms.iter().map(|(n, _)| n.label()));
        header.extend(r.vf_norms.iter().map(|(k, _)| format!("vf{k}")));
        header.push("max_coefficient_norm".into());
    }
    let mut t = CsvTable::new(header);
    for r in records {
        let mut row = vec![r.time];
        row.extend(r.l2_norms.iter().map(|(_, v)| *v));
        row.extend(r.vf_norms.iter().map(|(_, v)| *v));
        row.push(r.max_coefficient_norm);
        t.push_numbers(&row);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaDrift {
    /// `max_t max_x |θ|`.
    pub max_theta: f64,
    /// `max_t |∫θ(t) − ∫θ(0)|`.
    pub integral_drift: f64,
}

impl ThetaDrift {
    pub fn of(records: &[DiagnosticsRecord]) -> Self {
        let i0 = records.first().map_or(0.0, |r| r.theta_integral);
        Self {
            max_theta: records.iter().map(|r| r.theta_max).fold(0.0, f64::max),
            integral_drift: records
                .iter()
                .map(|r| (r.theta_integral - i0).abs())
                .fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    #[serde(flatten)]
    pub header: SummaryHeader,
    pub fit: Option<FitResult>,
    pub final_record: Option<DiagnosticsRecord>,
    pub theta_drift: ThetaDrift,
    pub dt: f64,
}

pub fn write_simulation(
    cfg: &ExperimentConfig,
    run: &SimulationRun,
    prefix: &str,
    h3_e: Option<&[f64]>,
) -> Result<(), ExperimentError> {
    let dir = &cfg.output.directory;
    if cfg.output.wants(OutputFormat::Csv) {
        records_table(&run.records, h3_e).write(dir, &format!("{prefix}.csv"))?;
        norms_table(&run.records).write(dir, &format!("{prefix}_norms.csv"))?;
    }
    Ok(())
}

pub fn cmd_simulate(cfg: &ExperimentConfig, opts: RunOptions) -> Result<SimulateSummary, ExperimentError> {
    let initial = initial_state(cfg)?;
    let run = run_simulation(cfg, &initial, opts.dynamics())?;
    write_simulation(cfg, &run, "simulate", None)?;
    let summary = SimulateSummary {
        header: SummaryHeader {
            command: "simulate",
            termination: run.trajectory.termination,
            t_final: run.trajectory.final_time(),
            dynamics: opts.dynamics(),
            config_hash: cfg.hash(),
            runtime_seconds: run.runtime_seconds,
        },
        fit: None,
        final_record: run.records.last().cloned(),
        theta_drift: ThetaDrift::of(&run.records),
        dt: run.trajectory.dt,
    };
    let dir = &cfg.output.directory;
    if cfg.output.wants(OutputFormat::Json) {
        write_json(dir, "simulate.json", &summary)?;
    }
    if cfg.output.wants(OutputFormat::Csv) {
        emit_plots(
            dir,
            &[
                (
                    PlotEntry {
                        file: "plot_sup_norm.csv".into(),
                        x: "time".into(),
                        y: "sup_norm".into(),
                        description: "max-norm of U against time".into(),
                    },
                    run.series(|r| r.sup_norm),
                ),
                (
                    PlotEntry {
                        file: "plot_theta_max.csv".into(),
                        x: "time".into(),
                        y: "theta_max".into(),
                        description: "max-norm of the relative vorticity against time".into(),
                    },
                    run.series(|r| r.theta_max),
                ),
            ],
        )?;
    }
    Ok(summary)
}
