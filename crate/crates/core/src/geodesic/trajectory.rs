use super::{branch, potentials_local, smooth_rhs, t_phi_rates, Branch, ConservedSet, GeodesicState};
use crate::error::{Error, Result};
use crate::geometry::{coframe_local, metric_at, KerrParams, Local, SpacetimePoint};
use crate::ode::{DenseSegment, Dop853, Dop853Options};
use crate::scalar::{lit, Real};

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryOptions<T> {
    /// Final affine parameter (may be below the initial one).
    pub s_max: T,
    /// Local error tolerance, used as both absolute and relative bound.
    pub tol: T,
    /// Stop at `r <= r+ (1 + horizon_eps)`.
    pub horizon_eps: T,
    /// Stop at `r >= r_escape`; `None` means `1000 M`.
    pub r_escape: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> TrajectoryOptions<T> {
    pub fn new(s_max: T, tol: T) -> Self {
        Self {
            s_max,
            tol,
            horizon_eps: lit(1e-6),
            r_escape: None,
            max_steps: 200_000,
        }
    }
}

/// Why integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    AffineLimit,
    Horizon,
    Escape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    RadialTurning,
    PolarTurning,
}

/// A located turning point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<T> {
    pub s: T,
    pub kind: EventKind,
}

/// Conservation and null-norm diagnostics at one affine parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics<T> {
    pub s: T,
    /// `|eta(v, v)| / (v^0)^2` for the integrated velocity `v`.
    pub null_residual: T,
    pub e_drift: T,
    pub phi_drift: T,
    pub kappa_drift: T,
}

/// Integrated null geodesic with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    params: KerrParams<T>,
    conserved: ConservedSet<T>,
    initial: GeodesicState<T>,
    y0: [T; 6],
    segments: Vec<DenseSegment<T, 6>>,
    /// Effective end of each segment (earlier than the step end when a
    /// termination surface was crossed inside it).
    ends: Vec<T>,
    /// Accepted state at each effective end (after projection).
    knots: Vec<[T; 6]>,
    events: Vec<Event<T>>,
    termination: Termination,
}

const BISECT_ITERS: usize = 200;

const PROJECTION_ITERS: usize = 2;

/// Extra projection rounds used when evaluating closed forms.
const SHELL_ITERS: usize = 3;

fn bisect<T: Real>(seg: &DenseSegment<T, 6>, lo: T, hi: T, f: impl Fn(&[T; 6]) -> T) -> T {
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(&seg.eval(lo));
    for _ in 0..BISECT_ITERS {
        let mid = lo + (hi - lo) * lit(0.5);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(&seg.eval(mid));
        if fm == T::zero() {
            return mid;
        }
        if (fm > T::zero()) == (f_lo > T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) * lit(0.5)
}

/// Pulls `(r, u_r)` and `(theta, u_theta)` back onto `u^2 = R(r)` and
/// `u^2 = Theta(theta)` with minimum-norm Newton steps. Near turning points
/// the correction goes mostly into the coordinate, elsewhere into the
/// momentum.
fn project_to_shell<T: Real>(c: &ConservedSet<T>, p: &KerrParams<T>, y: &[T; 6]) -> Option<[T; 6]> {
    let two = lit::<T>(2.0);
    let mut out = *y;
    for _ in 0..PROJECTION_ITERS {
        let l = Local::new(p, out[1], out[2]);
        let pot = potentials_local(c, &l).ok()?;
        let f = smooth_rhs(c, p, &out);
        for (x, u, v, dv) in [
            (1, 4, pot.radial, two * l.sigma * f[4]),
            (2, 5, pot.polar, two * l.sigma * f[5]),
        ] {
            let n2 = dv * dv + lit::<T>(4.0) * out[u] * out[u];
            if n2 == T::zero() {
                continue;
            }
            let k = (out[u] * out[u] - v) / n2;
            out[x] = out[x] + k * dv;
            out[u] = out[u] - k * two * out[u];
        }
    }
    if !(out[2] > T::zero() && out[2] < T::PI()) {
        out[2] = y[2];
    }
    (out != *y).then_some(out)
}

/// Integrates the null geodesic through `initial`.
pub fn integrate<T: Real>(
    initial: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
    opts: &TrajectoryOptions<T>,
) -> Result<Trajectory<T>> {
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive (got {})",
            opts.tol
        )));
    }
    if !opts.s_max.is_finite() {
        return Err(Error::InvalidArgument("s_max is not finite".into()));
    }
    let b = branch(initial, conserved, params)?;
    let p = initial.point();
    let y0 = [p.t(), p.r(), p.theta(), p.phi(), b.sr, b.st];
    let mut traj = Trajectory {
        params: *params,
        conserved: *conserved,
        initial: *initial,
        y0,
        segments: Vec::new(),
        ends: Vec::new(),
        knots: Vec::new(),
        events: Vec::new(),
        termination: Termination::AffineLimit,
    };
    let s0 = initial.s();
    if opts.s_max == s0 {
        return Ok(traj);
    }
    let dir = (opts.s_max - s0).signum();
    let r_h = params.outer_horizon() * (T::one() + opts.horizon_eps);
    let r_esc = opts.r_escape.unwrap_or(params.mass() * lit(1000.0));
    let c = *conserved;
    let kp = *params;
    let mut ode_opts = Dop853Options::with_tol(opts.tol);
    ode_opts.max_steps = opts.max_steps;
    let mut ode = Dop853::new(move |_s, y: &[T; 6]| smooth_rhs(&c, &kp, y), s0, y0, dir, ode_opts);

    while ode.s() != opts.s_max {
        let seg = ode.step(opts.s_max)?;
        let start = seg.start();
        let end = seg.end();
        if end.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                s: seg.s_end().to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut stop = seg.s_end();
        if end[1] <= r_h {
            stop = bisect(&seg, seg.s0, seg.s_end(), |y| y[1] - r_h);
            traj.termination = Termination::Horizon;
        } else if end[1] >= r_esc {
            stop = bisect(&seg, seg.s0, seg.s_end(), |y| y[1] - r_esc);
            traj.termination = Termination::Escape;
        }
        let mut found = Vec::new();
        for (idx, kind) in [(4, EventKind::RadialTurning), (5, EventKind::PolarTurning)] {
            let u_end = seg.eval(stop)[idx];
            if start[idx] != T::zero() && start[idx] * u_end < T::zero() {
                let s = bisect(&seg, seg.s0, stop, |y| y[idx]);
                found.push(Event { s, kind });
            }
        }
        found.sort_by(|a, b| (a.s * dir).partial_cmp(&(b.s * dir)).unwrap());
        traj.events.extend(found);
        let theta_end = seg.eval(stop)[2];
        if theta_end < T::zero() || theta_end > T::PI() {
            return Err(Error::InvalidArgument(format!(
                "orbit crosses the symmetry axis near s = {stop}; only Phi != 0 or axis-confined orbits are supported"
            )));
        }
        let raw_stop = if stop == seg.s_end() { end } else { seg.eval(stop) };
        let projected = project_to_shell(&c, &kp, &raw_stop);
        traj.segments.push(seg);
        traj.ends.push(stop);
        traj.knots.push(projected.unwrap_or(raw_stop));
        if traj.termination != Termination::AffineLimit {
            break;
        }
        if let Some(y) = projected {
            ode.reset(ode.s(), y);
        }
    }
    Ok(traj)
}

impl<T: Real> Trajectory<T> {
    pub fn params(&self) -> &KerrParams<T> {
        &self.params
    }

    pub fn conserved(&self) -> &ConservedSet<T> {
        &self.conserved
    }

    pub fn initial(&self) -> &GeodesicState<T> {
        &self.initial
    }

    pub fn s_start(&self) -> T {
        self.initial.s()
    }

    pub fn s_end(&self) -> T {
        self.ends.last().copied().unwrap_or(self.initial.s())
    }

    pub fn events(&self) -> &[Event<T>] {
        &self.events
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    /// Number of accepted integration steps.
    pub fn step_count(&self) -> usize {
        self.segments.len()
    }

    /// Affine parameters of all accepted step boundaries, starting with the
    /// initial one.
    pub fn breakpoints(&self) -> Vec<T> {
        std::iter::once(self.s_start())
            .chain(self.ends.iter().copied())
            .collect()
    }

    fn forward(&self) -> bool {
        self.s_end() >= self.s_start()
    }

    fn contains(&self, s: T) -> bool {
        let (a, b) = (self.s_start(), self.s_end());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        s >= lo && s <= hi
    }

    /// Raw smooth state `(t, r, theta, phi, u_r, u_theta)` at `s`.
    pub fn raw_at(&self, s: T) -> Result<[T; 6]> {
        if !self.contains(s) {
            return Err(Error::OutsideTrajectory {
                s: s.to_f64().unwrap_or(f64::NAN),
                start: self.s_start().to_f64().unwrap_or(f64::NAN),
                end: self.s_end().to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.segments.is_empty() || s == self.s_start() {
            return Ok(self.y0);
        }
        let fwd = self.forward();
        let idx = self
            .ends
            .partition_point(|&e| if fwd { e < s } else { e > s })
            .min(self.segments.len() - 1);
        if s == self.ends[idx] {
            return Ok(self.knots[idx]);
        }
        Ok(self.segments[idx].eval(s))
    }

    /// Geodesic state at `s`; branch signs follow the integrated momenta.
    pub fn state_at(&self, s: T) -> Result<GeodesicState<T>> {
        let y = self.raw_at(s)?;
        self.state_from_raw(s, &y)
    }

    pub(crate) fn state_from_raw(&self, s: T, y: &[T; 6]) -> Result<GeodesicState<T>> {
        let sign = |u: T, fallback: T| if u == T::zero() { fallback } else { T::sign_of(u) };
        let theta = y[2].max(T::zero()).min(T::PI());
        let point = SpacetimePoint::from_raw(y[0], y[1], theta, y[3]);
        GeodesicState::new(
            point,
            sign(y[4], self.initial.sign_r()),
            sign(y[5], self.initial.sign_theta()),
            s,
        )
    }

    /// Local geometry and potentials at `s` for the closed-form frame and
    /// basis. The interpolated state is first moved onto the shell
    /// `u^2 = R`, `u^2 = Theta`; the signed roots are the resulting momenta.
    pub(crate) fn branch_at(&self, s: T) -> Result<Branch<T>> {
        let raw = self.raw_at(s)?;
        let mut y = raw;
        for _ in 0..SHELL_ITERS {
            match project_to_shell(&self.conserved, &self.params, &y) {
                Some(next) => y = next,
                None => break,
            }
        }
        let l = Local::new(&self.params, y[1], y[2]);
        let pot = potentials_local(&self.conserved, &l)?;
        Ok(Branch {
            l,
            pot,
            sr: y[4],
            st: y[5],
        })
    }

    /// Coordinate velocity from the integrated state.
    pub fn velocity_at(&self, s: T) -> Result<[T; 4]> {
        let y = self.raw_at(s)?;
        Ok(self.velocity_from_raw(&y))
    }

    pub(crate) fn velocity_from_raw(&self, y: &[T; 6]) -> [T; 4] {
        let l = Local::new(&self.params, y[1], y[2]);
        let (tdot, phidot) = t_phi_rates(&self.conserved, &l);
        [tdot, y[4] / l.sigma, y[5] / l.sigma, phidot]
    }

    /// `n` affine parameters evenly spaced over the trajectory.
    pub fn sample_parameters(&self, n: usize) -> Vec<T> {
        let (a, b) = (self.s_start(), self.s_end());
        match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => {
                let last = lit::<T>((n - 1) as f64);
                (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            b
                        } else {
                            a + (b - a) * lit::<T>(i as f64) / last
                        }
                    })
                    .collect()
            }
        }
    }

    /// States at `n` evenly spaced affine parameters.
    pub fn samples(&self, n: usize) -> Result<Vec<GeodesicState<T>>> {
        self.sample_parameters(n)
            .into_iter()
            .map(|s| self.state_at(s))
            .collect()
    }

    /// Recomputes `E`, `Phi` and `kappa` from the integrated velocity.
    pub fn diagnostics_at(&self, s: T) -> Result<StepDiagnostics<T>> {
        let y = self.raw_at(s)?;
        Ok(self.diagnostics_raw(s, &y))
    }

    fn diagnostics_raw(&self, s: T, y: &[T; 6]) -> StepDiagnostics<T> {
        let v = self.velocity_from_raw(y);
        let g = metric_at(&self.params, y[1], y[2]);
        let e_rec = g[0][0] * v[0] + g[0][3] * v[3];
        let phi_rec = -(g[0][3] * v[0] + g[3][3] * v[3]);
        let l = Local::new(&self.params, y[1], y[2]);
        let w = coframe_local(&l);
        let f: [T; 4] = std::array::from_fn(|a| (0..4).fold(T::zero(), |acc, i| acc + w[a][i] * v[i]));
        let ac2 = l.a * l.a * l.cos * l.cos;
        let r2 = l.r * l.r;
        let kappa_rec = ac2 * (f[0] * f[0] - f[1] * f[1]) + r2 * (f[2] * f[2] + f[3] * f[3]);
        let null = (f[0] * f[0] - f[1] * f[1] - f[2] * f[2] - f[3] * f[3]).abs() / (f[0] * f[0]);
        let c = &self.conserved;
        let e = c.energy();
        let m = self.params.mass();
        StepDiagnostics {
            s,
            null_residual: null,
            e_drift: (e_rec - e).abs() / e,
            phi_drift: (phi_rec - c.angular_momentum()).abs() / c.angular_momentum().abs().max(e * m),
            kappa_drift: (kappa_rec - c.carter()).abs() / c.carter().max(e * e * m * m),
        }
    }

    /// Diagnostics at the initial point and after every accepted step.
    pub fn step_diagnostics(&self) -> Vec<StepDiagnostics<T>> {
        let mut out = vec![self.diagnostics_raw(self.s_start(), &self.y0)];
        for (knot, &end) in self.knots.iter().zip(&self.ends) {
            out.push(self.diagnostics_raw(end, knot));
        }
        out
    }

    /// Dense output pieces with their effective ends.
    pub(crate) fn pieces(&self) -> impl Iterator<Item = (&DenseSegment<T, 6>, T)> {
        self.segments.iter().zip(self.ends.iter().copied())
    }

    /// Total change of `phi` along the trajectory (not reduced mod 2 pi).
    pub fn azimuth_sweep(&self) -> T {
        match self.segments.last() {
            Some(seg) => seg.eval(self.s_end())[3] - self.y0[3],
            None => T::zero(),
        }
    }
}
