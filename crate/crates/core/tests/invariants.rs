use std::f64::consts::PI;

use proptest::prelude::*;
use rsw_core::diagnostics::{scattering_diagnostic, weighted_norm_triple, NormSpec};
use rsw_core::integrate::{integrate, Formulation, IntegratorConfig, StepSize};
use rsw_core::rsw::{
    kg_residual, make_initial_data, project_zero_rv, relative_vorticity, Dynamics, PrimitiveState, Profile,
};
use rsw_core::spectral::{make_grid, Grid};

fn grid() -> Grid {
    make_grid(64, 16.0 * PI, 2.0 / 3.0).unwrap()
}

fn short_run(formulation: Formulation, data: &PrimitiveState) -> Vec<PrimitiveState> {
    let cfg = IntegratorConfig {
        step: StepSize::Fixed(0.05),
        t_end: 2.0,
        checkpoint_interval: 0.5,
        formulation,
        ..Default::default()
    };
    let traj = integrate(data, &cfg).unwrap();
    assert!(traj.termination.is_completed());
    traj.checkpoints
}

#[test]
fn formulations_agree_on_short_runs() {
    let data = make_initial_data(&grid(), 0.05, 0.01, &Profile::default(), 2).unwrap();
    let sym = short_run(Formulation::Symmetrized, &data);
    let prim = short_run(Formulation::Primitive, &data);
    for (a, b) in sym.iter().zip(&prim) {
        assert_eq!(a.time, b.time);
        let d = (&a.to_triple() - &b.to_triple()).max_abs();
        assert!(d < 1e-6, "t = {}: {d}", a.time);
    }
}

#[test]
fn zero_vorticity_is_preserved_and_klein_gordon_holds() {
    let g = make_grid(128, 16.0 * PI, 2.0 / 3.0).unwrap();
    let data = make_initial_data(&g, 0.05, 0.0, &Profile::default(), 3).unwrap();
    let cfg = IntegratorConfig {
        t_end: 3.0,
        checkpoint_interval: 1.0,
        ..Default::default()
    };
    let traj = integrate(&data, &cfg).unwrap();
    for (p, s) in traj.checkpoints.iter().zip(traj.sym_states().unwrap()) {
        assert!(relative_vorticity(p).max_abs() < 1e-10, "t = {}", p.time);
        let r = kg_residual(&s).l2_norm() / s.to_triple().l2_norm();
        assert!(r < 1e-6, "t = {}: {r}", s.time);
    }
}

#[test]
fn vorticity_makes_the_klein_gordon_residual_visible() {
    let data = make_initial_data(&grid(), 0.05, 0.02, &Profile::default(), 3).unwrap();
    let s = data.to_sym().unwrap();
    assert!(kg_residual(&s).l2_norm() > 1e-3 * s.to_triple().l2_norm());
}

#[test]
fn linear_trajectories_scatter_exactly() {
    let data = make_initial_data(&grid(), 0.05, 0.0, &Profile::default(), 4).unwrap();
    let cfg = IntegratorConfig {
        t_end: 8.0,
        checkpoint_interval: 1.0,
        dynamics: Dynamics::Linear,
        ..Default::default()
    };
    let traj = integrate(&data, &cfg).unwrap();
    for t_star in [0.0, 3.0, 8.0] {
        for r in scattering_diagnostic(&traj, t_star, &traj.times(), 2.0).unwrap() {
            assert!(r.diff_u <= 1e-10 && r.diff_ut <= 1e-10, "{r:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn initial_data_has_requested_sizes(seed in 0u64..1000, delta in 0.01f64..0.3, eps in 0.001f64..0.05) {
        let g = make_grid(32, 8.0 * PI, 2.0 / 3.0).unwrap();
        let s = make_initial_data(&g, delta, eps, &Profile::default(), seed).unwrap();
        let theta = relative_vorticity(&s).sobolev_norm(2.0);
        prop_assert!((theta - eps).abs() <= 1e-10);
        let (k, e) = project_zero_rv(&s);
        let k3 = weighted_norm_triple(&k.to_triple(), &NormSpec::sobolev(3.0));
        prop_assert!((k3 - delta).abs() <= 1e-10 * delta.max(1.0), "{} vs {}", k3, delta);
        prop_assert!(relative_vorticity(&k).max_abs() <= 1e-12);
        let (kk, ke) = project_zero_rv(&k);
        prop_assert!((&kk.to_triple() - &k.to_triple()).max_abs() <= 1e-12);
        prop_assert!(ke.to_triple().max_abs() <= 1e-12);
        let sum = &k.to_triple() + &e.to_triple();
        prop_assert!((&sum - &s.to_triple()).max_abs() <= 1e-15);
    }

    #[test]
    fn reruns_are_bitwise_identical(seed in 0u64..1000) {
        let g = make_grid(16, 8.0, 2.0 / 3.0).unwrap();
        let s = make_initial_data(&g, 0.02, 0.005, &Profile::default(), seed).unwrap();
        let cfg = IntegratorConfig { t_end: 0.5, checkpoint_interval: 0.25, ..Default::default() };
        let a = integrate(&s, &cfg).unwrap();
        let b = integrate(&s, &cfg).unwrap();
        for (x, y) in a.checkpoints.iter().zip(&b.checkpoints) {
            let (tx, ty) = (x.to_triple(), y.to_triple());
            for c in 0..3 {
                prop_assert_eq!(tx.0[c].physical(), ty.0[c].physical());
            }
        }
    }
}
