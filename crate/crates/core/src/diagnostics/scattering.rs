use serde::{Deserialize, Serialize};

use crate::integrate::{linear_kg_propagator, Trajectory};
use crate::rsw::{triple_sobolev_norm, FieldTriple, SymState};

use super::DiagError;

/// Distance between the solution and the free flow matched at `t*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub time: f64,
    /// `‖U − U⁺‖_{H^l}`.
    pub diff_u: f64,
    /// `‖∂tU − ∂tU⁺‖_{H^{l−1}}`.
    pub diff_ut: f64,
}

fn find_checkpoint(states: &[SymState], t: f64) -> Result<&SymState, DiagError> {
    let last = states.last().map_or(0.0, |s| s.time);
    if t > last + 1e-9 || t < -1e-9 {
        return Err(DiagError::OutOfRange { time: t, last });
    }
    states
        .iter()
        .find(|s| (s.time - t).abs() <= 1e-9)
        .ok_or(DiagError::NotACheckpoint(t))
}

/// Compares the trajectory with the free Klein–Gordon solution that agrees with
/// `(U, ∂tU)` at `t_star`. Sample times must be checkpoint times.
pub fn scattering_diagnostic(
    traj: &Trajectory,
    t_star: f64,
    sample_times: &[f64],
    l: f64,
) -> Result<Vec<ScatterRow>, DiagError> {
    let states = traj.sym_states()?;
    let matched = find_checkpoint(&states, t_star)?;
    let u_star = matched.to_triple();
    let ut_star = traj.dynamics.time_derivative(matched);
    sample_times
        .iter()
        .map(|&t| {
            let s = find_checkpoint(&states, t)?;
            let (free, free_t) = linear_kg_propagator(&u_star, &ut_star, s.time - t_star);
            let u = s.to_triple();
            let ut = traj.dynamics.time_derivative(s);
            let du: FieldTriple = &u - &free;
            let dut: FieldTriple = &ut - &free_t;
            Ok(ScatterRow {
                time: s.time,
                diff_u: triple_sobolev_norm(&du, l),
                diff_ut: triple_sobolev_norm(&dut, l - 1.0),
            })
        })
        .collect()
}
