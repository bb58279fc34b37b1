//! Fixed-step RK4 integration with checkpointing and breakdown detection.

mod linear;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rsw::{primitive_rhs, symmetrized_tendency, Dynamics, FieldTriple, ModelError, PrimitiveState, SymState};

pub use linear::{linear_energy, linear_flow, linear_kg_propagator};

/// Which first-order system is stepped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Primitive,
    #[default]
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSize {
    Fixed(f64),
    Cfl(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step: StepSize,
    pub t_end: f64,
    pub checkpoint_interval: f64,
    /// Largest admissible max norm of `(m, u)` (or `(ρ, u)`).
    pub blowup_threshold: f64,
    pub formulation: Formulation,
    pub dynamics: Dynamics,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: StepSize::Cfl(0.5),
            t_end: 20.0,
            checkpoint_interval: 0.5,
            blowup_threshold: 10.0,
            formulation: Formulation::Symmetrized,
            dynamics: Dynamics::Nonlinear,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegrateError> {
        let bad = |msg: String| Err(IntegrateError::InvalidConfig(msg));
        match self.step {
            StepSize::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => return bad(format!("dt must be positive, got {dt}")),
            StepSize::Cfl(c) if !(c > 0.0 && c.is_finite()) => {
                return bad(format!("cfl_number must be positive, got {c}"))
            }
            _ => {}
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if !(self.checkpoint_interval > 0.0 && self.checkpoint_interval.is_finite()) {
            return bad(format!("checkpoint_interval must be positive, got {}", self.checkpoint_interval));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!("blowup_threshold must be positive, got {}", self.blowup_threshold));
        }
        Ok(())
    }
}

/// How an integration ended. Times are those of the first failed step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Blowup { time: f64 },
    Vacuum { time: f64 },
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Blowup { .. } => "blowup",
            Termination::Vacuum { .. } => "vacuum",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Checkpointed states; the first is at `t = 0` and times strictly increase.
    pub checkpoints: Vec<PrimitiveState>,
    pub termination: Termination,
    pub dt: f64,
    pub dynamics: Dynamics,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|s| s.time).collect()
    }

    pub fn final_time(&self) -> f64 {
        self.checkpoints.last().map_or(0.0, |s| s.time)
    }

    /// Checkpoints in symmetrized variables, converted consistently with the dynamics.
    pub fn sym_states(&self) -> Result<Vec<SymState>, ModelError> {
        self.checkpoints.iter().map(|s| self.dynamics.to_sym(s)).collect()
    }
}

/// Why a single step was rejected.
#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum StepError {
    #[error("non-finite values")]
    NonFinite,
    #[error("vacuum")]
    Vacuum,
}

impl From<ModelError> for StepError {
    fn from(_: ModelError) -> Self {
        StepError::Vacuum
    }
}

/// One classical RK4 step; stage states are dealiased.
pub fn rk4_step<F>(y: &FieldTriple, dt: f64, rhs: F) -> Result<FieldTriple, StepError>
where
    F: Fn(&FieldTriple) -> Result<FieldTriple, StepError>,
{
    let stage = |c: f64, k: &FieldTriple| FieldTriple::linear_combination(&[(1.0, y), (c * dt, k)]).dealias();
    let k1 = rhs(y)?;
    let k2 = rhs(&stage(0.5, &k1))?;
    let k3 = rhs(&stage(0.5, &k2))?;
    let k4 = rhs(&stage(1.0, &k3))?;
    let out = FieldTriple::linear_combination(&[
        (1.0, y),
        (dt / 6.0, &k1),
        (dt / 3.0, &k2),
        (dt / 3.0, &k3),
        (dt / 6.0, &k4),
    ])
    .dealias();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(StepError::NonFinite)
    }
}

/// Tendency of the stepped variables for a formulation.
pub fn tendency(formulation: Formulation, dynamics: Dynamics, y: &FieldTriple) -> Result<FieldTriple, StepError> {
    match (dynamics, formulation) {
        (Dynamics::Linear, _) => Ok(crate::rsw::linear_operator(y)),
        (Dynamics::Nonlinear, Formulation::Symmetrized) => Ok(symmetrized_tendency(y)),
        (Dynamics::Nonlinear, Formulation::Primitive) => {
            Ok(primitive_rhs(&PrimitiveState::from_triple(y.clone(), 0.0))?)
        }
    }
}

/// `dt = cfl · h / c_max` with `c_max = 1 + max|u| + max|m|/2 + ⟨k_max⟩h`.
pub fn cfl_dt(state: &SymState, cfl_number: f64) -> f64 {
    let grid = state.grid();
    let h = grid.h();
    let k = grid.max_retained_wavenumber();
    let bracket = (1.0 + k * k).sqrt();
    let c_max = 1.0 + state.u.max_abs() + 0.5 * state.m.max_abs() + bracket * h;
    cfl_number * h / c_max
}

fn stepped_variables(s: &PrimitiveState, cfg: &IntegratorConfig) -> Result<FieldTriple, ModelError> {
    Ok(match cfg.formulation {
        Formulation::Symmetrized => cfg.dynamics.to_sym(s)?.to_triple(),
        Formulation::Primitive => s.to_triple(),
    })
}

fn to_primitive(y: &FieldTriple, time: f64, cfg: &IntegratorConfig) -> PrimitiveState {
    match cfg.formulation {
        Formulation::Symmetrized => cfg.dynamics.to_primitive(&SymState::from_triple(y.clone(), time)),
        Formulation::Primitive => PrimitiveState::from_triple(y.clone(), time),
    }
}

fn inadmissible(y: &FieldTriple, cfg: &IntegratorConfig) -> bool {
    if cfg.dynamics == Dynamics::Linear {
        return false;
    }
    let floor = match cfg.formulation {
        Formulation::Symmetrized => -2.0,
        Formulation::Primitive => -1.0,
    };
    y[0].min() <= floor
}

/// Checkpoint times `0, Δ, 2Δ, …` up to and including `t_end`.
fn checkpoint_times(cfg: &IntegratorConfig) -> Vec<f64> {
    let count = (cfg.t_end / cfg.checkpoint_interval - 1e-9).ceil().max(0.0) as usize;
    let mut times: Vec<f64> = (0..=count)
        .map(|i| (i as f64 * cfg.checkpoint_interval).min(cfg.t_end))
        .collect();
    times.dedup();
    times
}

/// Integrates from `initial` and records checkpoints.
///
/// The step is fixed per run; within each checkpoint interval it is shrunk so that the
/// interval is an integer number of steps. In linear mode the exact flow `exp(t𝓛)` is
/// sampled instead.
pub fn integrate(initial: &PrimitiveState, cfg: &IntegratorConfig) -> Result<Trajectory, IntegrateError> {
    cfg.validate()?;
    if cfg.dynamics == Dynamics::Nonlinear {
        initial.check_admissible()?;
    }
    let y0 = stepped_variables(initial, cfg)?;
    let initial_norm = y0.max_abs();
    if !(cfg.blowup_threshold > initial_norm) {
        return Err(IntegrateError::InvalidConfig(format!(
            "blowup_threshold {} does not exceed the initial max norm {initial_norm}",
            cfg.blowup_threshold
        )));
    }
    let dt = match cfg.step {
        StepSize::Fixed(dt) => dt,
        StepSize::Cfl(c) => cfl_dt(&cfg.dynamics.to_sym(initial)?, c),
    };
    let times = checkpoint_times(cfg);
    let mut checkpoints = vec![to_primitive(&y0, 0.0, cfg)];
    let mut termination = Termination::Completed;

    if cfg.dynamics == Dynamics::Linear {
        for &t in &times[1..] {
            checkpoints.push(to_primitive(&linear_flow(&y0, t), t, cfg));
        }
        return Ok(Trajectory {
            checkpoints,
            termination,
            dt,
            dynamics: cfg.dynamics,
        });
    }

    let rhs = |y: &FieldTriple| tendency(cfg.formulation, cfg.dynamics, y);
    let mut y = y0;
    'outer: for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
        let h = (t1 - t0) / steps as f64;
        for i in 0..steps {
            let t_next = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * h };
            match rk4_step(&y, h, rhs) {
                Ok(next) if inadmissible(&next, cfg) => {
                    termination = Termination::Vacuum { time: t_next };
                    break 'outer;
                }
                Ok(next) if next.max_abs() > cfg.blowup_threshold => {
                    termination = Termination::Blowup { time: t_next };
                    break 'outer;
                }
                Ok(next) => y = next,
                Err(StepError::NonFinite) => {
                    termination = Termination::Blowup { time: t_next };
                    break 'outer;
                }
                Err(StepError::Vacuum) => {
                    termination = Termination::Vacuum { time: t_next };
                    break 'outer;
                }
            }
        }
        checkpoints.push(to_primitive(&y, t1, cfg));
    }
    Ok(Trajectory {
        checkpoints,
        termination,
        dt,
        dynamics: cfg.dynamics,
    })
}
