mod common;

use common::{config, state_strategy, table1, trajectory_strategy};
use kerr_faraday::frame::null_quad;
use kerr_faraday::geodesic::{integrate, tangent_frame_components, ConservedSet, GeodesicState, TrajectoryOptions};
use kerr_faraday::geometry::KerrParams;
use kerr_faraday::oracle::faraday_numeric;
use kerr_faraday::polarization::{
    angle_between, critical_point_residual, critical_points, faraday_angle, faraday_curve, faraday_rate,
    initial_polarization, measurement_basis, measurement_basis_cross, project, projected_pp_basis,
    projected_pp_basis_numeric,
};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn basis_is_orthonormal_and_transverse((p, c, st) in state_strategy()) {
        let b = measurement_basis(&st, &c, &p).unwrap();
        let k = project(&tangent_frame_components(&st, &c, &p).unwrap());
        let k = k.scale(1.0 / k.norm());
        prop_assert!((b.b1.dot(&b.b1) - 1.0).abs() < 1e-10);
        prop_assert!((b.b2.dot(&b.b2) - 1.0).abs() < 1e-10);
        prop_assert!(b.b1.dot(&b.b2).abs() < 1e-10);
        prop_assert!(b.b1.dot(&k).abs() < 1e-10 && b.b2.dot(&k).abs() < 1e-10);
        let x = measurement_basis_cross(&st, &c, &p).unwrap();
        prop_assert!(b.b1.max_abs_diff(&x.b1) < 1e-10 && b.b2.max_abs_diff(&x.b2) < 1e-10);
    }

    #[test]
    fn projected_basis_closed_form_matches_projection((p, c, st) in state_strategy()) {
        let (y, z) = projected_pp_basis(&p, st.point());
        let (yn, zn) = projected_pp_basis_numeric(&st, &c, &p).unwrap();
        for i in 0..2 {
            prop_assert!((y[i] - yn[i]).abs() < 1e-10 && (z[i] - zn[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn tangent_shift_is_invisible((p, c, st) in state_strategy(), c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, g in -10.0f64..10.0, s in 0.0f64..30.0) {
        prop_assume!(c1.hypot(c2) > 1e-3);
        let pol = initial_polarization(c1, c2, &st, &c, &p).unwrap();
        let basis = measurement_basis(&st, &c, &p).unwrap();
        let v = pol.vector_at(&st, &c, &p, s).unwrap();
        let k = null_quad(&st, &c, &p, s).unwrap().k;
        let a = basis.components(&project(&v));
        let b = basis.components(&project(&(v + k * g)));
        prop_assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
        prop_assert!((angle_between([c1, c2], a) - angle_between([c1, c2], b)).abs() < 1e-10);
    }

    #[test]
    fn angle_depends_on_r_and_theta_only(
        (p, _c, st) in state_strategy(),
        r in 3.0f64..50.0, th in 0.1f64..3.0, t in -9.0f64..9.0, phi in 0.0f64..6.0,
    ) {
        let a = *st.point();
        let b = p.point(t, r, th, phi).unwrap();
        let chi = faraday_angle(&a, &b, &p);
        let a2 = p.point(a.t() + 1.5, a.r(), a.theta(), 2.0).unwrap();
        let b2 = p.point(-t, r, th, 0.5).unwrap();
        prop_assert_eq!(faraday_angle(&a2, &b2, &p), chi);
        prop_assert_eq!(faraday_angle(&a.involution(), &b.involution(), &p), chi);
        prop_assert!((faraday_angle(&b, &a, &p) + chi).abs() < 1e-12);
    }

    #[test]
    fn rate_sign_follows_residual(tr in trajectory_strategy(5.0)) {
        let st = tr.initial();
        let res = critical_point_residual(st, tr.conserved(), tr.params());
        prop_assume!(res.is_ok());
        let rate = faraday_rate(&tr, 0.0).unwrap();
        prop_assume!(rate.abs() > 1e-12);
        let predicted = res.unwrap() * st.sign_r() * st.sign_theta();
        prop_assert_eq!(rate > 0.0, predicted > 0.0);
    }
}

#[test]
fn equatorial_photon_does_not_rotate() {
    // Theta = kappa - (a E - Phi)^2 = 0 keeps the photon in the plane.
    let p = KerrParams::new(1.0, 0.9).unwrap();
    let d = 0.9 - 4.5;
    let c = ConservedSet::new(1.0, 4.5, d * d).unwrap();
    let x = p.point(0.0, 20.0, FRAC_PI_2, 0.0).unwrap();
    let st = GeodesicState::new(x, -1.0, 1.0, 0.0).unwrap();
    let tr = integrate(&st, &c, &p, &TrajectoryOptions::new(60.0, 1e-10)).unwrap();
    let s = tr.sample_parameters(200);
    let chi = faraday_numeric(0.6, 0.8, &tr, &s, 1e-10).unwrap();
    assert!(chi.iter().all(|x| x.abs() < 1e-8));
    let closed = faraday_curve(&tr, &s).unwrap();
    assert!(closed.iter().all(|x| x.abs() < 1e-12));
}

#[test]
fn schwarzschild_photon_does_not_rotate() {
    let tr = {
        let p = KerrParams::<f64>::schwarzschild(1.0).unwrap();
        let c = ConservedSet::new(1.0, 3.0, 30.0).unwrap();
        let x = p.point(0.0, 20.0, 1.2, 0.0).unwrap();
        let st = GeodesicState::new(x, -1.0, 1.0, 0.0).unwrap();
        integrate(&st, &c, &p, &TrajectoryOptions::new(60.0, 1e-10)).unwrap()
    };
    assert!(!tr.events().is_empty());
    let s = tr.sample_parameters(200);
    let chi = faraday_numeric(1.0, 0.3, &tr, &s, 1e-10).unwrap();
    assert!(chi.iter().all(|x| x.abs() < 1e-8));
}

#[test]
fn oracle_angle_ignores_initial_t_and_phi() {
    let tr = table1(40.0);
    let x = tr.initial().point();
    let moved = GeodesicState::new(tr.params().point(7.0, x.r(), x.theta(), 2.5).unwrap(), -1.0, -1.0, 0.0).unwrap();
    let other = integrate(
        &moved,
        tr.conserved(),
        tr.params(),
        &TrajectoryOptions::new(40.0, 1e-10),
    )
    .unwrap();
    let s = tr.sample_parameters(41);
    let a = faraday_numeric(1.0, 0.0, &tr, &s, 1e-10).unwrap();
    let b = faraday_numeric(1.0, 0.0, &other, &s, 1e-10).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-6);
    }
}

#[test]
fn oracle_angle_ignores_energy_scale() {
    // (E, Phi, kappa) -> (l E, l Phi, l^2 kappa) traces the same path with s -> s / l.
    let tr = table1(40.0);
    let l = 2.5;
    let c = tr.conserved();
    let scaled = ConservedSet::new(l * c.energy(), l * c.angular_momentum(), l * l * c.carter()).unwrap();
    let other = integrate(
        tr.initial(),
        &scaled,
        tr.params(),
        &TrajectoryOptions::new(40.0 / l, 1e-10),
    )
    .unwrap();
    let s = tr.sample_parameters(21);
    let s_scaled: Vec<f64> = s.iter().map(|x| x / l).collect();
    let a = faraday_numeric(0.2, 0.9, &tr, &s, 1e-10).unwrap();
    let b = faraday_numeric(0.2, 0.9, &other, &s_scaled, 1e-10).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn critical_points_match_numerical_derivative() {
    let tr = table1(60.0);
    let roots = critical_points(&tr, 2000).unwrap();
    assert_eq!(roots.len(), 2);
    let s = tr.sample_parameters(60001);
    let chi = faraday_curve(&tr, &s).unwrap();
    let mut fd_roots = Vec::new();
    for i in 1..s.len() - 1 {
        let (d0, d1) = (chi[i] - chi[i - 1], chi[i + 1] - chi[i]);
        if d0 * d1 < 0.0 {
            fd_roots.push(s[i]);
        }
    }
    assert_eq!(fd_roots.len(), roots.len(), "{fd_roots:?} vs {roots:?}");
    for (a, b) in roots.iter().zip(&fd_roots) {
        assert!((a - b).abs() < 1e-4 * 60.0, "{a} vs {b}");
    }
    for r in roots {
        assert!(faraday_rate(&tr, r).unwrap().abs() < 1e-9);
    }
}

#[test]
fn state_residual_reports_turning_points() {
    let p = KerrParams::new(1.0, 0.9).unwrap();
    let c = ConservedSet::new(1.0, 3.0, 12.0).unwrap();
    let d: f64 = 0.9 * 1.2f64.sin() - 3.0 / 1.2f64.sin();
    let tight = ConservedSet::new(1.0, 3.0, d * d).unwrap();
    let x = p.point(0.0, 20.0, 1.2, 0.0).unwrap();
    let st = GeodesicState::new(x, -1.0, 1.0, 0.0).unwrap();
    assert!(critical_point_residual(&st, &c, &p).is_ok());
    let err = critical_point_residual(&st, &tight, &p).unwrap_err();
    assert!(
        matches!(err, kerr_faraday::Error::TurningPointProximity { which: "Theta", .. }),
        "{err}"
    );
}
