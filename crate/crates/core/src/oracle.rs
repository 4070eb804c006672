//! Brute-force parallel transport in coordinate components along an
//! integrated trajectory, used to cross-check the closed-form frame and the
//! Faraday angle.

use crate::error::{Error, Result};
use crate::frame::parallel_frame;
use crate::geodesic::Trajectory;
use crate::geometry::{christoffel_local, contract, metric_at, CoordVector, FrameVector, Local, Mat4};
use crate::ode::{Dop853, Dop853Options};
use crate::polarization::{angle_between, initial_polarization, project, unwrap};
use crate::scalar::{lit, Real};

/// At most this many vectors are transported jointly.
pub const MAX_VECTORS: usize = 4;

/// Result of transporting up to four vectors along a trajectory.
#[derive(Debug, Clone)]
pub struct TransportRun<T> {
    pub initial: Vec<CoordVector<T>>,
    pub s: Vec<T>,
    /// `vectors[i][k]` is vector `k` at `s[i]`.
    pub vectors: Vec<Vec<CoordVector<T>>>,
    /// Largest relative change of `g(V, V)`.
    pub norm_drift: T,
    /// Largest relative change of `g(V, K)`.
    pub orthogonality_drift: T,
}

fn order<T: Real>(traj: &Trajectory<T>, s_values: &[T]) -> Result<Vec<usize>> {
    let fwd = traj.s_end() >= traj.s_start();
    let mut idx: Vec<usize> = (0..s_values.len()).collect();
    for &s in s_values {
        traj.raw_at(s)?;
    }
    idx.sort_by(|&i, &j| {
        let (a, b) = (s_values[i], s_values[j]);
        let o = a.partial_cmp(&b).unwrap();
        if fwd {
            o
        } else {
            o.reverse()
        }
    });
    Ok(idx)
}

fn flatten<T: Real>(v: &[CoordVector<T>]) -> [T; 16] {
    let mut y = [T::zero(); 16];
    for (k, c) in v.iter().enumerate() {
        y[4 * k..4 * k + 4].copy_from_slice(&c.0);
    }
    y
}

fn unflatten<T: Real>(y: &[T; 16], n: usize) -> Vec<CoordVector<T>> {
    (0..n)
        .map(|k| CoordVector([y[4 * k], y[4 * k + 1], y[4 * k + 2], y[4 * k + 3]]))
        .collect()
}

/// Shared driver: integrates `dV/ds = rate(y_geodesic, V)` piece by piece
/// over the trajectory's dense output and samples at `s_values`.
fn drive<T: Real>(
    traj: &Trajectory<T>,
    y0: [T; 16],
    s_values: &[T],
    tol: T,
    rate: impl Fn(&[T; 6], &[T; 16]) -> [T; 16],
) -> Result<Vec<[T; 16]>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive (got {tol})"
        )));
    }
    let idx = order(traj, s_values)?;
    let mut out = vec![y0; s_values.len()];
    let mut next = 0;
    let fwd = traj.s_end() >= traj.s_start();
    let before = |a: T, b: T| if fwd { a <= b } else { a >= b };
    while next < idx.len() && s_values[idx[next]] == traj.s_start() {
        next += 1;
    }
    let mut y = y0;
    for (seg, end) in traj.pieces() {
        if next == idx.len() {
            break;
        }
        if end == seg.s0 {
            continue;
        }
        let dir = (end - seg.s0).signum();
        let f = |s: T, v: &[T; 16]| rate(&seg.eval(s), v);
        let mut ode = Dop853::new(f, seg.s0, y, dir, Dop853Options::with_tol(tol));
        while ode.s() != end {
            let step = ode.step(end)?;
            let stop = step.s_end();
            while next < idx.len() && before(s_values[idx[next]], stop) {
                out[idx[next]] = step.eval(s_values[idx[next]]);
                next += 1;
            }
        }
        y = *ode.y();
    }
    if let Some(&i) = idx.get(next) {
        return Err(Error::InvalidArgument(format!(
            "no dense output covers s = {}",
            s_values[i]
        )));
    }
    Ok(out)
}

/// Parallel transport of coordinate vectors given at the trajectory start,
/// sampled at `s_values`. The trajectory must stay off the symmetry axis.
pub fn transport<T: Real>(
    v0: &[CoordVector<T>],
    traj: &Trajectory<T>,
    s_values: &[T],
    tol: T,
) -> Result<TransportRun<T>> {
    if v0.is_empty() || v0.len() > MAX_VECTORS {
        return Err(Error::InvalidArgument(format!(
            "between 1 and {MAX_VECTORS} vectors can be transported (got {})",
            v0.len()
        )));
    }
    let y = traj.raw_at(traj.s_start())?;
    Local::new(traj.params(), y[1], y[2]).require_off_axis(y[2])?;
    let n = v0.len();
    let params = *traj.params();
    let rate = |g: &[T; 6], v: &[T; 16]| {
        let l = Local::new(&params, g[1], g[2]);
        let gamma = christoffel_local(&l);
        let u = traj.velocity_from_raw(g);
        let mut d = [T::zero(); 16];
        for k in 0..n {
            let vk = [v[4 * k], v[4 * k + 1], v[4 * k + 2], v[4 * k + 3]];
            let c = contract(&gamma, &u, &vk);
            for i in 0..4 {
                d[4 * k + i] = -c[i];
            }
        }
        d
    };
    let raw = drive(traj, flatten(v0), s_values, tol, rate)?;
    let vectors: Vec<Vec<CoordVector<T>>> = raw.iter().map(|y| unflatten(y, n)).collect();

    let metric_dot = |s: T, a: &CoordVector<T>, b: &CoordVector<T>| -> Result<T> {
        let y = traj.raw_at(s)?;
        let g = metric_at(&params, y[1], y[2]);
        Ok(dot(&g, a, b))
    };
    let tangent = |s: T| -> Result<CoordVector<T>> { Ok(CoordVector(traj.velocity_at(s)?)) };
    let s0 = traj.s_start();
    let k0 = tangent(s0)?;
    let euclid = |v: &CoordVector<T>| -> Result<T> {
        let y = traj.raw_at(s0)?;
        let p = crate::geometry::SpacetimePoint::from_raw(y[0], y[1], y[2], y[3]);
        let f = v.to_frame(&params, &p);
        Ok(f.0.iter().fold(T::zero(), |a, x| a + *x * *x))
    };
    let k_scale = euclid(&k0)?.sqrt();
    let mut norm_drift = T::zero();
    let mut orth_drift = T::zero();
    for (k, v) in v0.iter().enumerate() {
        let scale = euclid(v)?;
        let n0 = metric_dot(s0, v, v)?;
        let o0 = metric_dot(s0, v, &k0)?;
        for (i, &s) in s_values.iter().enumerate() {
            let w = &vectors[i][k];
            let n1 = metric_dot(s, w, w)?;
            let o1 = metric_dot(s, w, &tangent(s)?)?;
            norm_drift = norm_drift.max((n1 - n0).abs() / scale);
            orth_drift = orth_drift.max((o1 - o0).abs() / (scale.sqrt() * k_scale));
        }
    }
    Ok(TransportRun {
        initial: v0.to_vec(),
        s: s_values.to_vec(),
        vectors,
        norm_drift,
        orthogonality_drift: orth_drift,
    })
}

fn dot<T: Real>(g: &Mat4<T>, a: &CoordVector<T>, b: &CoordVector<T>) -> T {
    let mut acc = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            acc = acc + g[i][j] * a.0[i] * b.0[j];
        }
    }
    acc
}

/// Comparison of the closed-form parallel frame with the transported one.
#[derive(Debug, Clone)]
pub struct FrameCheck<T> {
    /// Largest componentwise difference in the symmetric frame.
    pub max_frame_residual: T,
    pub norm_drift: T,
    pub run: TransportRun<T>,
}

/// Transports the closed-form frame at the trajectory start and compares it
/// with the closed-form frame at every `s`.
pub fn check_frame<T: Real>(traj: &Trajectory<T>, s_values: &[T], tol: T) -> Result<FrameCheck<T>> {
    let (c, p) = (traj.conserved(), traj.params());
    let st0 = *traj.initial();
    let f0 = parallel_frame(&st0, c, p, st0.s())?;
    let legs0 = f0
        .legs
        .iter()
        .map(|l| l.to_coord(p, st0.point()))
        .collect::<Result<Vec<_>>>()?;
    let run = transport(&legs0, traj, s_values, tol)?;
    let mut worst = T::zero();
    for (i, &s) in s_values.iter().enumerate() {
        let st = traj.state_at(s)?;
        let closed = traj.frame_at(s)?;
        for (leg, v) in closed.legs.iter().zip(&run.vectors[i]) {
            worst = worst.max(leg.max_abs_diff(&v.to_frame(p, st.point())));
        }
    }
    Ok(FrameCheck {
        max_frame_residual: worst,
        norm_drift: run.norm_drift,
        run,
    })
}

/// Faraday angle from the transported polarization vector: the vector with
/// measured components `(c1, c2)` at the start is transported, re-measured
/// at every `s`, and the unwrapped angle from `(c1, c2)` is returned.
pub fn faraday_numeric<T: Real>(c1: T, c2: T, traj: &Trajectory<T>, s_values: &[T], tol: T) -> Result<Vec<T>> {
    let (c, p) = (traj.conserved(), traj.params());
    let st0 = *traj.initial();
    let norm = c1.hypot(c2);
    if norm == T::zero() {
        return Err(Error::InvalidArgument("polarization (c1, c2) must be nonzero".into()));
    }
    let (c1, c2) = (c1 / norm, c2 / norm);
    let pol = initial_polarization(c1, c2, &st0, c, p)?;
    let v0 = pol.vector_at(&st0, c, p, st0.s())?.to_coord(p, st0.point())?;
    let run = transport(&[v0], traj, s_values, tol)?;
    let mut chi = Vec::with_capacity(s_values.len());
    for (i, &s) in s_values.iter().enumerate() {
        let st = traj.state_at(s)?;
        let f: FrameVector<T> = run.vectors[i][0].to_frame(p, st.point());
        let o = traj.measurement_basis_at(s)?.components(&project(&f));
        chi.push(angle_between([c1, c2], o));
    }
    unwrap(&mut chi);
    Ok(chi)
}

/// Metric derivatives `dg[l][i][j] = d_l g_ij` on the symmetry axis in the
/// chart `(t, r, X, Y)` with `X = theta cos(phi)`, `Y = theta sin(phi)`
/// (`pi - theta` on the southern axis).
pub fn axis_chart(params: &crate::geometry::KerrParams<f64>, r: f64) -> (Mat4<f64>, [Mat4<f64>; 4]) {
    axis_chart_generic(params, r)
}

fn axis_chart_generic<T: Real>(params: &crate::geometry::KerrParams<T>, r: T) -> (Mat4<T>, [Mat4<T>; 4]) {
    let (m, a) = (params.mass(), params.spin());
    let two = lit::<T>(2.0);
    let big_a = r * r + a * a;
    let delta = r * r - two * m * r + a * a;
    let d_delta = two * (r - m);
    let z = T::zero();
    let mut g = [[z; 4]; 4];
    g[0][0] = delta / big_a;
    g[1][1] = -big_a / delta;
    g[2][2] = -big_a;
    g[3][3] = -big_a;
    let w = two * m * a * r / big_a;
    let mut dg = [[[z; 4]; 4]; 4];
    dg[1][0][0] = (d_delta * big_a - two * r * delta) / (big_a * big_a);
    dg[1][1][1] = -(two * r * delta - big_a * d_delta) / (delta * delta);
    dg[1][2][2] = -two * r;
    dg[1][3][3] = -two * r;
    dg[2][0][3] = w;
    dg[2][3][0] = w;
    dg[3][0][2] = -w;
    dg[3][2][0] = -w;
    (g, dg)
}

fn christoffel_diag<T: Real>(g: &Mat4<T>, dg: &[Mat4<T>; 4]) -> [[[T; 4]; 4]; 4] {
    let half = lit::<T>(0.5);
    let mut out = [[[T::zero(); 4]; 4]; 4];
    for (i, oi) in out.iter_mut().enumerate() {
        for j in 0..4 {
            for k in 0..4 {
                oi[j][k] = half * (dg[j][i][k] + dg[k][i][j] - dg[i][j][k]) / g[i][i];
            }
        }
    }
    out
}

/// Components of a chart vector along the limits of the second and third
/// symmetric-frame legs at azimuth `phi`.
fn axis_measure<T: Real>(v: &[T], big_a: T, phi: T, south: bool) -> [T; 2] {
    let (sp, cp) = (phi.sin(), phi.cos());
    let k = big_a.sqrt();
    let e3 = k * (v[2] * cp + v[3] * sp);
    [k * (v[2] * sp - v[3] * cp), if south { -e3 } else { e3 }]
}

fn axis_vector<T: Real>(o: [T; 2], big_a: T, phi: T, south: bool) -> [T; 4] {
    let (sp, cp) = (phi.sin(), phi.cos());
    let k = T::one() / big_a.sqrt();
    let f3 = if south { -o[1] } else { o[1] };
    [
        T::zero(),
        T::zero(),
        k * (o[0] * sp + f3 * cp),
        k * (-o[0] * cp + f3 * sp),
    ]
}

/// Faraday angle along a photon confined to the symmetry axis, from
/// transport in the regular chart `(t, r, X, Y)`.
pub fn axial_rotation<T: Real>(traj: &Trajectory<T>, c1: T, c2: T, s_values: &[T], tol: T) -> Result<Vec<T>> {
    let st0 = traj.initial();
    let theta0 = st0.theta();
    let south = theta0 == T::PI();
    if !(theta0 == T::zero() || south) {
        return Err(Error::NotAxial(format!("theta0 = {theta0}")));
    }
    let c = traj.conserved();
    if c.angular_momentum() != T::zero() || c.carter() != T::zero() {
        return Err(Error::NotAxial(format!(
            "requires Phi = 0 and kappa = 0 (got Phi = {}, kappa = {})",
            c.angular_momentum(),
            c.carter()
        )));
    }
    if c1 == T::zero() && c2 == T::zero() {
        return Err(Error::InvalidArgument("polarization (c1, c2) must be nonzero".into()));
    }
    let params = *traj.params();
    let y0 = traj.raw_at(traj.s_start())?;
    let a0 = y0[1] * y0[1] + params.spin() * params.spin();
    let mut v0 = [T::zero(); 16];
    v0[..4].copy_from_slice(&axis_vector([c1, c2], a0, y0[3], south));
    let rate = |g: &[T; 6], v: &[T; 16]| {
        let (gm, dg) = axis_chart_generic(&params, g[1]);
        let gamma = christoffel_diag(&gm, &dg);
        let u = traj.velocity_from_raw(g);
        let chart_u = [u[0], u[1], T::zero(), T::zero()];
        let c = contract(&gamma, &chart_u, &[v[0], v[1], v[2], v[3]]);
        let mut d = [T::zero(); 16];
        for i in 0..4 {
            d[i] = -c[i];
        }
        d
    };
    let raw = drive(traj, v0, s_values, tol, rate)?;
    let mut chi = Vec::with_capacity(s_values.len());
    for (y, &s) in raw.iter().zip(s_values) {
        let g = traj.raw_at(s)?;
        let big_a = g[1] * g[1] + params.spin() * params.spin();
        chi.push(angle_between([c1, c2], axis_measure(&y[..4], big_a, g[3], south)));
    }
    unwrap(&mut chi);
    Ok(chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::null_quad;
    use crate::geodesic::{integrate, ConservedSet, GeodesicState, TrajectoryOptions};
    use crate::geometry::{metric_components, KerrParams};
    use crate::polarization::faraday_curve;

    fn table1(s_max: f64) -> Trajectory<f64> {
        let p = KerrParams::<f64>::new(1.0, 0.9).unwrap();
        let c = ConservedSet::new(1.0, 3.0, 12.0).unwrap();
        let x = p.point(0.0, 20.0, 1.57, 0.0).unwrap();
        let st = GeodesicState::new(x, -1.0, -1.0, 0.0).unwrap();
        integrate(&st, &c, &p, &TrajectoryOptions::new(s_max, 1e-10)).unwrap()
    }

    fn axis(theta: f64, sr: f64) -> Trajectory<f64> {
        let p = KerrParams::<f64>::new(1.0, 0.9).unwrap();
        let c = ConservedSet::new(1.0, 0.0, 0.0).unwrap();
        let x = p.point(0.0, 20.0, theta, 0.3).unwrap();
        let st = GeodesicState::new(x, sr, 1.0, 0.0).unwrap();
        integrate(&st, &c, &p, &TrajectoryOptions::new(15.0, 1e-10)).unwrap()
    }

    #[test]
    fn tangent_is_self_parallel() {
        let tr = table1(40.0);
        let s = tr.sample_parameters(41);
        let k0 = CoordVector(tr.velocity_at(0.0).unwrap());
        let run = transport(&[k0], &tr, &s, 1e-10).unwrap();
        for (i, &si) in s.iter().enumerate() {
            let k = tr.velocity_at(si).unwrap();
            let v = run.vectors[i][0].0;
            for j in 0..4 {
                assert!((v[j] - k[j]).abs() < 1e-8 * (1.0 + k[j].abs()), "s={si} j={j}");
            }
        }
    }

    #[test]
    fn frame_agrees_with_closed_form() {
        let tr = table1(60.0);
        let s = tr.sample_parameters(121);
        let chk = check_frame(&tr, &s, 1e-10).unwrap();
        assert!(chk.max_frame_residual < 1e-6, "{}", chk.max_frame_residual);
        assert!(chk.norm_drift < 1e-8, "{}", chk.norm_drift);
        assert!(chk.run.orthogonality_drift < 1e-8);
    }

    #[test]
    fn rotation_agrees_with_closed_form() {
        let tr = table1(60.0);
        let s = tr.sample_parameters(121);
        let num = faraday_numeric(0.3, 0.7, &tr, &s, 1e-10).unwrap();
        let closed = faraday_curve(&tr, &s).unwrap();
        let worst = num.iter().zip(&closed).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst < 1e-6, "{worst}");
        assert!(closed.iter().any(|c| c.abs() > 1e-3));
    }

    #[test]
    fn rotation_is_scale_free() {
        let tr = table1(30.0);
        let s = tr.sample_parameters(11);
        let a = faraday_numeric(0.3, 0.7, &tr, &s, 1e-10).unwrap();
        let b = faraday_numeric(3.0, 7.0, &tr, &s, 1e-10).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn transport_is_linear() {
        let tr = table1(40.0);
        let s = tr.sample_parameters(9);
        let st = tr.initial();
        let q = null_quad(st, tr.conserved(), tr.params(), 0.0).unwrap();
        let u = q.y.to_coord(tr.params(), st.point()).unwrap();
        let v = q.x.to_coord(tr.params(), st.point()).unwrap();
        let w = u * 2.0 + v * -0.5;
        let run = transport(&[u, v, w], &tr, &s, 1e-10).unwrap();
        for vs in &run.vectors {
            let lin = vs[0] * 2.0 + vs[1] * -0.5;
            assert!(lin.max_abs_diff(&vs[2]) < 1e-10 * (1.0 + lin.0.iter().fold(0.0f64, |m, x| m.max(x.abs()))));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let tr = table1(10.0);
        assert!(transport(&[], &tr, &[0.0], 1e-10).is_err());
        let k0 = CoordVector(tr.velocity_at(0.0).unwrap());
        assert!(transport(&[k0], &tr, &[11.0], 1e-10).is_err());
        assert!(transport(&[k0], &tr, &[1.0], 0.0).is_err());
        assert!(axial_rotation(&tr, 1.0, 0.0, &[0.0], 1e-10).is_err());
    }

    #[test]
    fn unordered_samples_are_returned_in_place() {
        let tr = table1(20.0);
        let a = faraday_numeric(1.0, 0.0, &tr, &[20.0, 0.0, 10.0], 1e-10).unwrap();
        let b = faraday_numeric(1.0, 0.0, &tr, &[0.0, 10.0, 20.0], 1e-10).unwrap();
        assert!((a[0] - b[2]).abs() < 1e-14 && (a[2] - b[1]).abs() < 1e-14 && a[1].abs() < 1e-14);
    }

    /// Exact chart metric off the axis, from the Boyer–Lindquist one.
    fn chart_metric(p: &KerrParams<f64>, r: f64, x: f64, y: f64) -> Mat4<f64> {
        let th = (x * x + y * y).sqrt();
        let ph = y.atan2(x);
        let bl = metric_components(p, &p.point(0.0, r, th, ph).unwrap());
        // d(theta)/d(X, Y) and d(phi)/d(X, Y)
        let jac = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, x / th, y / th],
            [0.0, 0.0, -y / (th * th), x / (th * th)],
        ];
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        g[i][j] += jac[k][i] * jac[l][j] * bl[k][l];
                    }
                }
            }
        }
        g
    }

    #[test]
    fn axis_chart_matches_finite_differences() {
        let p = KerrParams::<f64>::new(1.0, 0.8).unwrap();
        let r = 3.7;
        let (g, dg) = axis_chart(&p, r);
        let h = 1e-5;
        let near = chart_metric(&p, r, 1e-7, 2e-7);
        for i in 0..4 {
            for j in 0..4 {
                assert!((near[i][j] - g[i][j]).abs() < 1e-6, "g[{i}][{j}]");
            }
        }
        let base = [r, 1e-9, 1.3e-9];
        for l in 1..4 {
            let mut lo = base;
            let mut hi = base;
            lo[l - 1] -= h;
            hi[l - 1] += h;
            let gm = chart_metric(&p, lo[0], lo[1], lo[2]);
            let gp = chart_metric(&p, hi[0], hi[1], hi[2]);
            for i in 0..4 {
                for j in 0..4 {
                    let fd = (gp[i][j] - gm[i][j]) / (2.0 * h);
                    assert!(
                        (fd - dg[l][i][j]).abs() < 1e-6,
                        "d{l} g[{i}][{j}]: {fd} vs {}",
                        dg[l][i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn axis_measurement_round_trip() {
        for south in [false, true] {
            let v = axis_vector([0.6f64, -0.8], 5.0, 1.1, south);
            let o = axis_measure(&v, 5.0, 1.1, south);
            assert!((o[0] - 0.6).abs() < 1e-15 && (o[1] + 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn axial_photons_do_not_rotate() {
        for (theta, sr) in [(0.0, -1.0), (0.0, 1.0), (std::f64::consts::PI, -1.0)] {
            let tr = axis(theta, sr);
            assert!(tr.azimuth_sweep().abs() > 1e-3);
            let s = tr.sample_parameters(31);
            let chi = axial_rotation(&tr, 0.6, 0.8, &s, 1e-10).unwrap();
            let worst = chi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(worst < 1e-8, "theta={theta}: {worst}");
        }
    }
}
