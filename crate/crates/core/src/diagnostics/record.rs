use serde::{Deserialize, Serialize};

use crate::rsw::{relative_vorticity, Dynamics, SymState};

use super::{energy_f, support_radius, vf_norm, weighted_norm_triple, DiagError, NormKind, NormSpec, VfTarget};

/// Pointwise threshold defining the support radius.
pub const SUPPORT_TOLERANCE: f64 = 1e-10;

/// What to measure at each checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecordOptions {
    pub norms: Vec<NormSpec>,
    /// Highest vector-field order for `vf_norms`, `l2_u`, `l2_du` and the energy.
    pub vf_max_order: usize,
}

impl Default for RecordOptions {
    fn default() -> Self {
        Self {
            norms: vec![NormSpec::sobolev(2.0), NormSpec::sobolev(3.0)],
            vf_max_order: 1,
        }
    }
}

/// Diagnostics of one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    /// `max_x |U(x)|`.
    pub sup_norm: f64,
    /// `‖U‖_{Γ,k}`.
    pub l2_u: f64,
    /// `‖∂U‖_{Γ,k}`.
    pub l2_du: f64,
    pub l2_norms: Vec<(NormSpec, f64)>,
    pub theta_max: f64,
    pub theta_integral: f64,
    pub energy_f: f64,
    pub max_coefficient_norm: f64,
    /// `(order, ‖U‖_{Γ,order})` for each order up to the maximum.
    pub vf_norms: Vec<(usize, f64)>,
    pub support_radius: f64,
}

pub fn record(s: &SymState, dynamics: Dynamics, opts: &RecordOptions) -> Result<DiagnosticsRecord, DiagError> {
    let k = opts.vf_max_order;
    let u = s.to_triple();
    let theta = relative_vorticity(&dynamics.to_primitive(s));
    let vf_norms = (0..=k)
        .map(|o| vf_norm(s, dynamics, o, VfTarget::U, NormKind::L2, 0.0).map(|v| (o, v)))
        .collect::<Result<Vec<_>, _>>()?;
    let energy = energy_f(s, dynamics, k)?;
    Ok(DiagnosticsRecord {
        time: s.time,
        sup_norm: u.max_pointwise_norm(),
        l2_u: vf_norms[k].1,
        l2_du: vf_norm(s, dynamics, k, VfTarget::Gradient, NormKind::L2, 0.0)?,
        l2_norms: opts.norms.iter().map(|n| (*n, weighted_norm_triple(&u, n))).collect(),
        theta_max: theta.max_abs(),
        theta_integral: theta.integral(),
        energy_f: energy.value,
        max_coefficient_norm: energy.max_coefficient_norm,
        vf_norms,
        support_radius: support_radius(&u, SUPPORT_TOLERANCE),
    })
}
