mod common;

use common::{config, state_strategy, table1, trajectory_strategy};
use kerr_faraday::geodesic::{integrate, ConservedSet, EventKind, GeodesicState, Termination, TrajectoryOptions};
use kerr_faraday::geometry::KerrParams;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn null_norm_and_constants_hold_at_every_step(tr in trajectory_strategy(80.0)) {
        for d in tr.step_diagnostics() {
            prop_assert!(d.null_residual < 1e-10, "{d:?}");
            prop_assert!(d.e_drift < 1e-8 && d.phi_drift < 1e-8 && d.kappa_drift < 1e-8, "{d:?}");
        }
    }

    #[test]
    fn coordinates_are_monotone_between_events(tr in trajectory_strategy(80.0)) {
        let s = tr.sample_parameters(800);
        for (idx, kind) in [(1, EventKind::RadialTurning), (2, EventKind::PolarTurning)] {
            let cuts: Vec<f64> = tr.events().iter().filter(|e| e.kind == kind).map(|e| e.s).collect();
            let values: Vec<(f64, f64)> = s.iter().map(|&x| (x, tr.raw_at(x).unwrap()[idx])).collect();
            for w in values.windows(3) {
                if cuts.iter().any(|&c| c >= w[0].0 && c <= w[2].0) {
                    continue;
                }
                let (d0, d1) = (w[1].1 - w[0].1, w[2].1 - w[1].1);
                prop_assert!(d0 * d1 >= -1e-24, "coordinate {idx} not monotone near s = {}", w[1].0);
            }
        }
    }

    #[test]
    fn reversed_momenta_retrace_the_orbit(tr in trajectory_strategy(30.0)) {
        let end = tr.state_at(tr.s_end()).unwrap();
        let flipped = GeodesicState::new(*end.point(), -end.sign_r(), -end.sign_theta(), 0.0).unwrap();
        let back = integrate(&flipped, tr.conserved(), tr.params(), &TrajectoryOptions::new(tr.s_end(), 1e-11));
        let back = back.unwrap();
        prop_assume!(back.termination() == Termination::AffineLimit);
        let y = back.raw_at(back.s_end()).unwrap();
        let x0 = tr.initial().point();
        prop_assert!((y[1] - x0.r()).abs() < 1e-6 * x0.r().max(1.0), "{} vs {}", y[1], x0.r());
        prop_assert!((y[2] - x0.theta()).abs() < 1e-6);
    }

    #[test]
    fn backward_integration_returns_to_start(tr in trajectory_strategy(30.0)) {
        let end = tr.state_at(tr.s_end()).unwrap();
        let back = integrate(&end, tr.conserved(), tr.params(), &TrajectoryOptions::new(0.0, 1e-11)).unwrap();
        let y = back.raw_at(0.0).unwrap();
        let x0 = tr.initial().point();
        let tau = std::f64::consts::TAU;
        let dphi = (y[3] - x0.phi()).rem_euclid(tau);
        prop_assert!(dphi.min(tau - dphi) < 1e-6, "phi {} vs {}", y[3], x0.phi());
        for (got, want) in y[..3].iter().zip(x0.coords()) {
            prop_assert!((got - want).abs() < 1e-6 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn initial_tangent_is_null((p, c, st) in state_strategy()) {
        let k = kerr_faraday::geodesic::tangent_frame_components(&st, &c, &p).unwrap();
        prop_assert!(k.eta_norm2().abs() < 1e-12 * k.0[0] * k.0[0]);
    }
}

#[test]
fn table1_scatters_with_one_pericentre() {
    let tr = table1(60.0);
    assert_eq!(tr.termination(), Termination::AffineLimit);
    let radial: Vec<_> = tr
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::RadialTurning)
        .collect();
    assert_eq!(radial.len(), 1);
    assert!(tr.state_at(60.0).unwrap().r() > 20.0);
}

#[test]
fn escape_radius_stops_integration() {
    let p = KerrParams::<f64>::new(1.0, 0.5).unwrap();
    let c = ConservedSet::new(1.0, 4.0, 20.0).unwrap();
    let x = p.point(0.0, 20.0, 1.4, 0.0).unwrap();
    let st = GeodesicState::new(x, 1.0, 1.0, 0.0).unwrap();
    let mut opts = TrajectoryOptions::new(1e4, 1e-10);
    opts.r_escape = Some(50.0);
    let tr = integrate(&st, &c, &p, &opts).unwrap();
    assert_eq!(tr.termination(), Termination::Escape);
    assert!((tr.state_at(tr.s_end()).unwrap().r() - 50.0).abs() < 1e-8);
}

#[test]
fn single_precision_orbit_tracks_double() {
    let p = KerrParams::<f32>::new(1.0, 0.9).unwrap();
    let c = ConservedSet::new(1.0f32, 3.0, 12.0).unwrap();
    let x = p.point(0.0, 20.0, 1.57, 0.0).unwrap();
    let st = GeodesicState::new(x, -1.0, -1.0, 0.0).unwrap();
    let tr = integrate(&st, &c, &p, &TrajectoryOptions::new(40.0f32, 1e-5)).unwrap();
    let reference = table1(40.0);
    let a = tr.raw_at(40.0).unwrap();
    let b = reference.raw_at(40.0).unwrap();
    for i in 0..4 {
        assert!(
            (a[i] as f64 - b[i]).abs() < 1e-3 * b[i].abs().max(1.0),
            "{i}: {} vs {}",
            a[i],
            b[i]
        );
    }
}

#[test]
fn stalled_orbit_reports_step_limit() {
    let mut opts = TrajectoryOptions::new(60.0, 1e-10);
    opts.max_steps = 3;
    let p = KerrParams::<f64>::new(1.0, 0.9).unwrap();
    let c = ConservedSet::new(1.0, 3.0, 12.0).unwrap();
    let st = GeodesicState::new(p.point(0.0, 20.0, 1.57, 0.0).unwrap(), -1.0, -1.0, 0.0).unwrap();
    let err = integrate(&st, &c, &p, &opts).unwrap_err();
    assert!(matches!(err, kerr_faraday::Error::StalledOrbit { .. }), "{err}");
}
