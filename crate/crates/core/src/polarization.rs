//! Carter observers, the intrinsic measurement basis and the closed-form
//! Faraday rotation angle.

use crate::error::{Error, Result};
use crate::frame::null_quad;
use crate::geodesic::{branch, tangent_from_branch, Branch, ConservedSet, GeodesicState, Trajectory};
use crate::geometry::{clamped_cos, CoordVector, FrameVector, KerrParams, Local, SpacetimePoint};
use crate::scalar::{lit, Real};

/// Spatial vector in the triad of a Carter observer (legs 1, 2, 3).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreeVector<T>(pub [T; 3]);

impl<T: Real> ThreeVector<T> {
    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        let (u, v) = (&self.0, &o.0);
        Self([
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ])
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, k: T) -> Self {
        Self(self.0.map(|x| x * k))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        (0..3).fold(T::zero(), |m, i| m.max((self.0[i] - o.0[i]).abs()))
    }
}

/// Orthonormal pair spanning the plane transverse to the photon direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis<T> {
    pub b1: ThreeVector<T>,
    pub b2: ThreeVector<T>,
}

impl<T: Real> MeasurementBasis<T> {
    /// Components of a spatial vector along `(b1, b2)`.
    pub fn components(&self, v: &ThreeVector<T>) -> [T; 2] {
        [v.dot(&self.b1), v.dot(&self.b2)]
    }

    pub fn vector(&self, c1: T, c2: T) -> ThreeVector<T> {
        self.b1.scale(c1).add(&self.b2.scale(c2))
    }
}

/// Polarization prescribed by `(c1, c2)` at emission, stored as constant
/// components on the legs of the parallel frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState<T> {
    pub c1: T,
    pub c2: T,
    pub frame_components: FrameVector<T>,
}

/// Carter observer `U = ((r^2 + a^2) d/dt + a d/dphi) / sqrt(Sigma Delta)`.
pub fn carter_observer<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> CoordVector<T> {
    let l = Local::at(params, point);
    let n = T::one() / (l.sigma * l.delta).sqrt();
    CoordVector([n * l.rho2, T::zero(), T::zero(), n * l.a])
}

/// Drops the time component of frame components.
pub fn project<T: Real>(v: &FrameVector<T>) -> ThreeVector<T> {
    ThreeVector(v.spatial())
}

/// Unit photon direction seen by the Carter observer.
pub fn photon_direction<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<ThreeVector<T>> {
    let k = project(&crate::geodesic::tangent_frame_components(state, conserved, params)?);
    let n = k.norm();
    if n == T::zero() {
        return Err(Error::BasisUndefined {
            s: state.s().to_f64().unwrap_or(f64::NAN),
            reason: "vanishing photon direction",
        });
    }
    Ok(k.scale(T::one() / n))
}

fn basis_error<T: Real>(state: &GeodesicState<T>, reason: &'static str) -> Error {
    Error::BasisUndefined {
        s: state.s().to_f64().unwrap_or(f64::NAN),
        reason,
    }
}

/// Closed-form measurement basis
///
/// ```text
/// b1 = (0, -sqrt(Theta), D) / sqrt(kappa)
/// b2 = (kappa sqrt(Delta), -D sqrt(R), -sqrt(R) sqrt(Theta)) / (sqrt(kappa) P)
/// ```
///
/// with branch signs on the roots; `b2 = K x b1` for the unit direction `K`.
pub fn measurement_basis<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<MeasurementBasis<T>> {
    let b = branch(state, conserved, params)?;
    basis_from(&b, conserved, state.s())
}

pub(crate) fn basis_from<T: Real>(b: &Branch<T>, conserved: &ConservedSet<T>, s: T) -> Result<MeasurementBasis<T>> {
    let err = |reason| Error::BasisUndefined {
        s: s.to_f64().unwrap_or(f64::NAN),
        reason,
    };
    conserved
        .require_frame()
        .map_err(|_| err("photon along a principal null direction"))?;
    if b.pot.p <= T::zero() {
        return Err(err("P must be positive for a future-directed photon"));
    }
    let kappa = conserved.carter();
    let rk = kappa.sqrt();
    let d = b.pot.d;
    let b1 = ThreeVector([T::zero(), -b.st / rk, d / rk]);
    let n = T::one() / (rk * b.pot.p);
    let b2 = ThreeVector([n * kappa * b.l.delta.sqrt(), -n * d * b.sr, -n * b.sr * b.st]);
    Ok(MeasurementBasis { b1, b2 })
}

impl<T: Real> Trajectory<T> {
    /// Measurement basis at `s`, with roots taken from the integrated momenta.
    pub fn measurement_basis_at(&self, s: T) -> Result<MeasurementBasis<T>> {
        basis_from(&self.branch_at(s)?, self.conserved(), s)
    }
}

/// Measurement basis from the defining cross products
/// `b1 = l x K / |l x K|`, `b2 = K x b1` with `l = (1, 0, 0)`.
pub fn measurement_basis_cross<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<MeasurementBasis<T>> {
    let k = photon_direction(state, conserved, params)?;
    let ell = ThreeVector([T::one(), T::zero(), T::zero()]);
    let c = ell.cross(&k);
    let n = c.norm();
    if n <= lit::<T>(1e-12) {
        return Err(basis_error(state, "photon along a principal null direction"));
    }
    let b1 = c.scale(T::one() / n);
    let b2 = k.cross(&b1);
    Ok(MeasurementBasis { b1, b2 })
}

/// `y = (-a cos(theta), -r)/sqrt(Sigma)` and `z = (-r, a cos(theta))/sqrt(Sigma)`:
/// components of the projected `Y` and `Z` legs in the measurement basis.
pub fn projected_pp_basis<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> ([T; 2], [T; 2]) {
    let r = point.r();
    let ac = params.spin() * clamped_cos(point.theta());
    let n = T::one() / (r * r + ac * ac).sqrt();
    ([-ac * n, -r * n], [-r * n, ac * n])
}

/// Same quantities via projection of the closed-form `Y`, `Z` onto the
/// measurement basis.
pub fn projected_pp_basis_numeric<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<([T; 2], [T; 2])> {
    let q = null_quad(state, conserved, params, state.s())?;
    let basis = measurement_basis(state, conserved, params)?;
    Ok((basis.components(&project(&q.y)), basis.components(&project(&q.z))))
}

/// Constant frame components of the polarization with measured components
/// `(c1, c2)` at the initial state.
pub fn initial_polarization<T: Real>(
    c1: T,
    c2: T,
    initial: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<PolarizationState<T>> {
    if c1 == T::zero() && c2 == T::zero() {
        return Err(Error::InvalidArgument("polarization (c1, c2) must be nonzero".into()));
    }
    conserved.require_frame()?;
    let (y, z) = projected_pp_basis(params, initial.point());
    Ok(PolarizationState {
        c1,
        c2,
        frame_components: FrameVector([T::zero(), T::zero(), c1 * y[0] + c2 * y[1], c1 * z[0] + c2 * z[1]]),
    })
}

impl<T: Real> PolarizationState<T> {
    /// Polarization vector in the symmetric frame at a state (with the
    /// closed-form parallel frame).
    pub fn vector_at(
        &self,
        state: &GeodesicState<T>,
        conserved: &ConservedSet<T>,
        params: &KerrParams<T>,
        s: T,
    ) -> Result<FrameVector<T>> {
        let f = null_quad(state, conserved, params, s)?.frame();
        let c = self.frame_components.0;
        Ok(f.legs
            .iter()
            .zip(c)
            .fold(FrameVector::zero(), |acc, (leg, k)| acc + *leg * k))
    }

    /// Measured components in the basis at `state`.
    pub fn measured(
        &self,
        state: &GeodesicState<T>,
        conserved: &ConservedSet<T>,
        params: &KerrParams<T>,
        s: T,
    ) -> Result<[T; 2]> {
        let v = self.vector_at(state, conserved, params, s)?;
        Ok(measurement_basis(state, conserved, params)?.components(&project(&v)))
    }
}

fn rotation_parts<T: Real>(params: &KerrParams<T>, p0: &SpacetimePoint<T>, p: &SpacetimePoint<T>) -> (T, T, T) {
    let a = params.spin();
    let (r0, c0) = (p0.r(), clamped_cos(p0.theta()));
    let (r, c) = (p.r(), clamped_cos(p.theta()));
    let num = a * (r * c0 - r0 * c);
    let den = r * r0 + a * a * c0 * c;
    let norm = ((r0 * r0 + a * a * c0 * c0) * (r * r + a * a * c * c)).sqrt();
    (num, den, norm)
}

/// Closed-form Faraday angle between two events on a photon path:
/// `tan(chi) = a (r cos(theta0) - r0 cos(theta)) / (r r0 + a^2 cos(theta0) cos(theta))`.
pub fn faraday_angle<T: Real>(initial: &SpacetimePoint<T>, fin: &SpacetimePoint<T>, params: &KerrParams<T>) -> T {
    let (num, den, _) = rotation_parts(params, initial, fin);
    num.atan2(den)
}

/// Rotation taking the measured polarization at `initial` to the one at
/// `fin`: `[[cos, -sin], [sin, cos]]`.
pub fn rotation_matrix<T: Real>(
    initial: &SpacetimePoint<T>,
    fin: &SpacetimePoint<T>,
    params: &KerrParams<T>,
) -> [[T; 2]; 2] {
    let (num, den, norm) = rotation_parts(params, initial, fin);
    let (c, s) = (den / norm, num / norm);
    [[c, -s], [s, c]]
}

/// Signed angle from `(c1, c2)` to `(o1, o2)`.
pub fn angle_between<T: Real>(c: [T; 2], o: [T; 2]) -> T {
    (c[0] * o[1] - c[1] * o[0]).atan2(c[0] * o[0] + c[1] * o[1])
}

/// Removes `2 pi` jumps from a sequence of angles.
pub fn unwrap<T: Real>(angles: &mut [T]) {
    let two_pi = T::PI() + T::PI();
    for i in 1..angles.len() {
        let mut d = angles[i] - angles[i - 1];
        while d > T::PI() {
            angles[i] = angles[i] - two_pi;
            d = d - two_pi;
        }
        while d < -T::PI() {
            angles[i] = angles[i] + two_pi;
            d = d + two_pi;
        }
    }
}

/// Closed-form angle along a trajectory, unwrapped.
pub fn faraday_curve<T: Real>(traj: &Trajectory<T>, s_values: &[T]) -> Result<Vec<T>> {
    let p0 = *traj.initial().point();
    let mut out = s_values
        .iter()
        .map(|&s| traj.state_at(s).map(|st| faraday_angle(&p0, st.point(), traj.params())))
        .collect::<Result<Vec<_>>>()?;
    unwrap(&mut out);
    Ok(out)
}

/// Relative size of a potential below which the critical-point residual is
/// reported as indeterminate.
const TURNING_TOL: f64 = 1e-14;

/// `r/(±sqrt(R)) + cot(theta)/(±sqrt(Theta))`; its zeros are the critical
/// points of the Faraday angle.
pub fn critical_point_residual<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<T> {
    let b = branch(state, conserved, params)?;
    let tol = lit::<T>(TURNING_TOL);
    let r_scale = b.pot.p * b.pot.p;
    if b.pot.radial <= tol * r_scale {
        return Err(Error::TurningPointProximity {
            which: "R",
            value: b.pot.radial.to_f64().unwrap_or(f64::NAN),
        });
    }
    let t_scale = conserved.carter().max(lit(1e-300));
    if b.pot.polar <= tol * t_scale {
        return Err(Error::TurningPointProximity {
            which: "Theta",
            value: b.pot.polar.to_f64().unwrap_or(f64::NAN),
        });
    }
    let cot = b.l.cos / b.l.sin;
    Ok(b.l.r / b.sr + cot / b.st)
}

/// `d chi / ds` of the closed form, from the integrated velocity:
/// `a Sigma0 (cos(theta) dr/ds + r sin(theta) dtheta/ds) / (Sigma0 Sigma)`.
pub fn faraday_rate<T: Real>(traj: &Trajectory<T>, s: T) -> Result<T> {
    let y = traj.raw_at(s)?;
    let v = traj.velocity_at(s)?;
    let a = traj.params().spin();
    let l = Local::new(traj.params(), y[1], y[2]);
    Ok(a * (l.cos * v[1] + l.r * l.sin * v[2]) / l.sigma)
}

impl<T: Real> Trajectory<T> {
    /// [`critical_point_residual`] from the integrated momenta; infinite at
    /// turning points.
    pub fn critical_residual_at(&self, s: T) -> Result<T> {
        let b = self.branch_at(s)?;
        Ok(b.l.r / b.sr + b.l.cos / (b.l.sin * b.st))
    }

    /// The residual times `sin(theta) u_r u_theta`:
    /// `cos(theta) u_r + r sin(theta) u_theta`. Same zeros, no poles, and the
    /// same sign as `d chi / ds` for `a > 0`.
    pub fn critical_numerator_at(&self, s: T) -> Result<T> {
        let b = self.branch_at(s)?;
        Ok(b.l.cos * b.sr + b.l.r * b.l.sin * b.st)
    }
}

/// Critical points of the Faraday angle: sign changes of the residual
/// between `n` samples, refined by bisection. Brackets are taken on the
/// pole-free form [`Trajectory::critical_numerator_at`], so roots lying
/// next to a turning point are not lost.
pub fn critical_points<T: Real>(traj: &Trajectory<T>, n: usize) -> Result<Vec<T>> {
    let f = |s: T| traj.critical_numerator_at(s);
    let grid = traj.sample_parameters(n.max(2));
    let mut roots = Vec::new();
    let mut prev = (grid[0], f(grid[0])?);
    for &s in &grid[1..] {
        let cur = f(s)?;
        let (s0, f0) = prev;
        if f0 == T::zero() {
            roots.push(s0);
        } else if f0 * cur < T::zero() {
            roots.push(bisect_root(&f, s0, f0, s)?);
        }
        prev = (s, cur);
    }
    if prev.1 == T::zero() && roots.last() != Some(&prev.0) {
        roots.push(prev.0);
    }
    Ok(roots)
}

fn bisect_root<T: Real>(f: &impl Fn(T) -> Result<T>, lo: T, f_lo: T, hi: T) -> Result<T> {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = lo + (hi - lo) * lit(0.5);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (f_lo > T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * lit(0.5))
}

/// Maximum `|chi|` for a photon confined to the symmetry axis, measured with
/// the numerically transported polarization.
pub fn check_zero_rotation_axis<T: Real>(traj: &Trajectory<T>, n: usize, tol: T) -> Result<T> {
    let s = traj.sample_parameters(n.max(2));
    let chi = crate::oracle::axial_rotation(traj, T::one(), T::zero(), &s, tol)?;
    Ok(chi.iter().fold(T::zero(), |m, x| m.max(x.abs())))
}

/// Unit tangent direction from the branch; used in tests.
#[allow(dead_code)]
pub(crate) fn unit_tangent<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<ThreeVector<T>> {
    let b = branch(state, conserved, params)?;
    let k = project(&tangent_from_branch(&b));
    Ok(k.scale(T::one() / k.norm()))
}
