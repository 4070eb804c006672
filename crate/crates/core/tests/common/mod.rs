#![allow(dead_code)]

use kerr_faraday::geodesic::{
    integrate, potentials, ConservedSet, GeodesicState, Termination, Trajectory, TrajectoryOptions,
};
use kerr_faraday::geometry::KerrParams;
use proptest::prelude::*;

pub fn point_strategy() -> impl Strategy<Value = (KerrParams<f64>, f64, f64)> {
    (1..10u32, 1.1f64..40.0, 0.05f64..3.09).prop_map(|(k, x, th)| {
        let p = KerrParams::new(1.0, 0.1 * k as f64).unwrap();
        (p, p.outer_horizon() * x, th)
    })
}

/// Allowed-region initial data with `M = E = 1`.
pub fn state_strategy() -> impl Strategy<Value = (KerrParams<f64>, ConservedSet<f64>, GeodesicState<f64>)> {
    (
        1..10u32,
        5.0f64..30.0,
        0.3f64..2.84,
        -8.0f64..8.0,
        0.2f64..40.0,
        prop::bool::ANY,
        prop::bool::ANY,
    )
        .prop_filter_map("radial potential negative", |(k, r, th, phi, big_theta, sr, st)| {
            let p = KerrParams::new(1.0, 0.1 * k as f64).unwrap();
            let d = p.spin() * th.sin() - phi / th.sin();
            let c = ConservedSet::new(1.0, phi, d * d + big_theta).unwrap();
            let pot = potentials(&c, &p, r, th).ok()?;
            if pot.radial <= 1e-3 * pot.p * pot.p {
                return None;
            }
            let x = p.point(0.0, r, th, 0.0).unwrap();
            let sign = |b: bool| if b { 1.0 } else { -1.0 };
            Some((p, c, GeodesicState::new(x, sign(sr), sign(st), 0.0).unwrap()))
        })
}

/// Scattering trajectories (horizon captures are discarded).
pub fn trajectory_strategy(s_max: f64) -> impl Strategy<Value = Trajectory<f64>> {
    state_strategy().prop_filter_map("captured", move |(p, c, st)| {
        let tr = integrate(&st, &c, &p, &TrajectoryOptions::new(s_max, 1e-10)).ok()?;
        (tr.termination() != Termination::Horizon).then_some(tr)
    })
}

pub fn table1(s_max: f64) -> Trajectory<f64> {
    let p = KerrParams::new(1.0, 0.9).unwrap();
    let c = ConservedSet::new(1.0, 3.0, 12.0).unwrap();
    let x = p.point(0.0, 20.0, 1.57, 0.0).unwrap();
    let st = GeodesicState::new(x, -1.0, -1.0, 0.0).unwrap();
    integrate(&st, &c, &p, &TrajectoryOptions::new(s_max, 1e-10)).unwrap()
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}
