//! Kerr exterior geometry in Boyer–Lindquist coordinates.
//!
//! Coordinates are ordered `(t, r, theta, phi)` and the metric signature is
//! `(+, -, -, -)`. Frame quantities refer to Carter's symmetric orthonormal
//! coframe
//!
//! ```text
//! w0 = sqrt(Delta/Sigma) (dt - a sin^2(theta) dphi)
//! w1 = sqrt(Sigma/Delta) dr
//! w2 = sin(theta)/sqrt(Sigma) (a dt - (r^2 + a^2) dphi)
//! w3 = sqrt(Sigma) dtheta
//! ```
//!
//! and its dual frame `e(a)`. Frame indices are raised and lowered with
//! `eta = diag(1, -1, -1, -1)`.
//!
//! The orientation of `w2` is kept as written above: it points towards
//! negative `phi` at large `r`. All closed-form frame components elsewhere in
//! the crate assume it.

mod christoffel;
mod symmetry;
mod vectors;

pub(crate) use christoffel::christoffel_local;
pub use christoffel::{christoffel, contract, Christoffel};
pub use symmetry::{
    axial_killing_vector, carter_constant, frame_to_coord_two_form, hodge_dual, killing_tensor, killing_tensor_frame,
    killing_yano, time_killing_vector,
};
pub use vectors::{CoordVector, FrameVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// 4x4 matrix stored row-major.
pub type Mat4<T> = [[T; 4]; 4];

pub const T_IDX: usize = 0;
pub const R_IDX: usize = 1;
pub const TH_IDX: usize = 2;
pub const PH_IDX: usize = 3;

/// Mass and spin of a non-extreme Kerr black hole in geometric units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams<T> {
    mass: T,
    spin: T,
}

impl<T: Real> KerrParams<T> {
    /// Rejects `M <= a` (extreme and super-extreme) and negative spin.
    pub fn new(mass: T, spin: T) -> Result<Self> {
        let ok = mass.is_finite() && spin.is_finite() && mass > T::zero() && spin >= T::zero();
        if !ok || spin >= mass {
            return Err(Error::InvalidKerrParams {
                mass: mass.to_f64().unwrap_or(f64::NAN),
                spin: spin.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mass, spin })
    }

    /// Schwarzschild black hole of mass `mass`.
    pub fn schwarzschild(mass: T) -> Result<Self> {
        Self::new(mass, T::zero())
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn spin(&self) -> T {
        self.spin
    }

    /// Outer and inner horizon radii `M ± sqrt(M^2 - a^2)`.
    pub fn horizon_radii(&self) -> (T, T) {
        let root = (self.mass * self.mass - self.spin * self.spin).sqrt();
        (self.mass + root, self.mass - root)
    }

    pub fn outer_horizon(&self) -> T {
        self.horizon_radii().0
    }

    /// Builds a point of the exterior, rejecting `r <= r+` and `theta`
    /// outside `[0, pi]`. `phi` is reduced to `[0, 2 pi)`.
    pub fn point(&self, t: T, r: T, theta: T, phi: T) -> Result<SpacetimePoint<T>> {
        let r_plus = self.outer_horizon();
        if !(r > r_plus) {
            return Err(Error::InsideHorizon {
                r: r.to_f64().unwrap_or(f64::NAN),
                r_plus: r_plus.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !(theta >= T::zero() && theta <= T::PI()) {
            return Err(Error::PolarAngleOutOfRange {
                theta: theta.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(SpacetimePoint::from_raw(t, r, theta, phi))
    }

    /// Stationary-limit radius `M + sqrt(M^2 - a^2 cos^2 theta)`.
    pub fn ergosphere_radius(&self, theta: T) -> T {
        let c = clamped_cos(theta);
        self.mass + (self.mass * self.mass - self.spin * self.spin * c * c).sqrt()
    }
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn normalize_azimuth<T: Real>(phi: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut p = phi % two_pi;
    if p < T::zero() {
        p = p + two_pi;
    }
    if p >= two_pi {
        p = p - two_pi;
    }
    p
}

/// Boyer–Lindquist event in the Kerr exterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint<T> {
    t: T,
    r: T,
    theta: T,
    phi: T,
}

impl<T: Real> SpacetimePoint<T> {
    /// Unchecked construction; callers guarantee the domain.
    pub(crate) fn from_raw(t: T, r: T, theta: T, phi: T) -> Self {
        Self {
            t,
            r,
            theta,
            phi: normalize_azimuth(phi),
        }
    }

    pub fn t(&self) -> T {
        self.t
    }
    pub fn r(&self) -> T {
        self.r
    }
    pub fn theta(&self) -> T {
        self.theta
    }
    pub fn phi(&self) -> T {
        self.phi
    }

    /// Image under the time-and-rotation reversal `(t, phi) -> (-t, -phi)`.
    pub fn involution(&self) -> Self {
        Self::from_raw(-self.t, self.r, self.theta, -self.phi)
    }

    /// Coordinates as an array `(t, r, theta, phi)`.
    pub fn coords(&self) -> [T; 4] {
        [self.t, self.r, self.theta, self.phi]
    }
}

#[inline]
pub(crate) fn clamped_cos<T: Real>(theta: T) -> T {
    theta.cos().max(-T::one()).min(T::one())
}

/// Frequently reused functions of `(r, theta)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Local<T> {
    pub m: T,
    pub a: T,
    pub r: T,
    pub sin: T,
    pub cos: T,
    pub sigma: T,
    pub delta: T,
    /// `r^2 + a^2`
    pub rho2: T,
}

impl<T: Real> Local<T> {
    #[inline]
    pub fn new(params: &KerrParams<T>, r: T, theta: T) -> Self {
        let (m, a) = (params.mass, params.spin);
        let cos = clamped_cos(theta);
        // Exact zero on the axis so that axis checks are reliable at theta = pi.
        let sin = if theta == T::zero() || theta == T::PI() {
            T::zero()
        } else {
            theta.sin().abs()
        };
        let rho2 = r * r + a * a;
        Self {
            m,
            a,
            r,
            sin,
            cos,
            sigma: r * r + a * a * cos * cos,
            delta: r * r - lit::<T>(2.0) * m * r + a * a,
            rho2,
        }
    }

    #[inline]
    pub fn at(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Self {
        Self::new(params, point.r, point.theta)
    }

    pub fn require_off_axis(&self, theta: T) -> Result<()> {
        if self.sin > T::zero() {
            Ok(())
        } else {
            Err(Error::OnAxis {
                theta: theta.to_f64().unwrap_or(f64::NAN),
            })
        }
    }
}

/// `(M ± sqrt(M^2 - a^2))` for the given parameters.
pub fn horizon_radii<T: Real>(params: &KerrParams<T>) -> (T, T) {
    params.horizon_radii()
}

/// `(Sigma, Delta)` with `Sigma = r^2 + a^2 cos^2 theta` and
/// `Delta = r^2 - 2 M r + a^2`.
pub fn scalars<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> (T, T) {
    let l = Local::at(params, point);
    (l.sigma, l.delta)
}

/// Covariant metric components `g_ij`.
pub fn metric_components<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Mat4<T> {
    metric_at(params, point.r, point.theta)
}

pub(crate) fn metric_at<T: Real>(params: &KerrParams<T>, r: T, theta: T) -> Mat4<T> {
    let l = Local::new(params, r, theta);
    let s2 = l.sin * l.sin;
    let two = lit::<T>(2.0);
    let mut g = [[T::zero(); 4]; 4];
    g[T_IDX][T_IDX] = (l.delta - l.a * l.a * s2) / l.sigma;
    g[T_IDX][PH_IDX] = two * l.m * l.a * l.r * s2 / l.sigma;
    g[PH_IDX][T_IDX] = g[T_IDX][PH_IDX];
    g[PH_IDX][PH_IDX] = -s2 * (l.rho2 * l.rho2 - l.delta * l.a * l.a * s2) / l.sigma;
    g[R_IDX][R_IDX] = -l.sigma / l.delta;
    g[TH_IDX][TH_IDX] = -l.sigma;
    g
}

/// Contravariant metric `g^ij`. Undefined on the axis.
pub fn inverse_metric<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Result<Mat4<T>> {
    let l = Local::at(params, point);
    l.require_off_axis(point.theta)?;
    let s2 = l.sin * l.sin;
    let two = lit::<T>(2.0);
    let sd = l.sigma * l.delta;
    let mut g = [[T::zero(); 4]; 4];
    g[T_IDX][T_IDX] = (l.rho2 * l.rho2 - l.delta * l.a * l.a * s2) / sd;
    g[T_IDX][PH_IDX] = two * l.m * l.a * l.r / sd;
    g[PH_IDX][T_IDX] = g[T_IDX][PH_IDX];
    g[PH_IDX][PH_IDX] = -(l.delta - l.a * l.a * s2) / (sd * s2);
    g[R_IDX][R_IDX] = -l.delta / l.sigma;
    g[TH_IDX][TH_IDX] = -T::one() / l.sigma;
    Ok(g)
}

/// Symmetric orthonormal coframe; row `a` holds the coordinate components of
/// `w^a`.
pub fn coframe<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Mat4<T> {
    coframe_local(&Local::at(params, point))
}

pub(crate) fn coframe_local<T: Real>(l: &Local<T>) -> Mat4<T> {
    let z = T::zero();
    let sqd = l.delta.sqrt();
    let sqs = l.sigma.sqrt();
    let w0 = sqd / sqs;
    let w2 = l.sin / sqs;
    [
        [w0, z, z, -w0 * l.a * l.sin * l.sin],
        [z, sqs / sqd, z, z],
        [w2 * l.a, z, z, -w2 * l.rho2],
        [z, z, sqs, z],
    ]
}

/// Frame dual to [`coframe`]; row `a` holds the coordinate components of
/// `e(a)`, so that `sum_i frame[a][i] * coframe[b][i] = delta_ab`.
/// Undefined on the axis.
pub fn frame<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Result<Mat4<T>> {
    let l = Local::at(params, point);
    l.require_off_axis(point.theta)?;
    Ok(frame_local(&l))
}

pub(crate) fn frame_local<T: Real>(l: &Local<T>) -> Mat4<T> {
    let z = T::zero();
    let sqd = l.delta.sqrt();
    let sqs = l.sigma.sqrt();
    let u = T::one() / (sqs * sqd);
    [
        [u * l.rho2, z, z, u * l.a],
        [z, sqd / sqs, z, z],
        [-l.a * l.sin / sqs, z, z, -T::one() / (sqs * l.sin)],
        [z, z, T::one() / sqs, z],
    ]
}

/// Principal null directions `(l, n)` normalised so that `g(l, n) = 1` and
/// `U = (l + n)/sqrt(2)`.
pub fn principal_null_directions<T: Real>(
    params: &KerrParams<T>,
    point: &SpacetimePoint<T>,
) -> (CoordVector<T>, CoordVector<T>) {
    let l = Local::at(params, point);
    let norm = T::one() / (lit::<T>(2.0) * l.sigma * l.delta).sqrt();
    let ell = CoordVector([norm * l.rho2, norm * l.delta, T::zero(), norm * l.a]);
    let n = CoordVector([norm * l.rho2, -norm * l.delta, T::zero(), norm * l.a]);
    (ell, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kerr(m: f64, a: f64) -> KerrParams<f64> {
        KerrParams::new(m, a).unwrap()
    }

    fn mat_mul(a: &Mat4<f64>, b: &Mat4<f64>) -> Mat4<f64> {
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    #[test]
    fn horizon_radii_examples() {
        assert_eq!(horizon_radii(&kerr(1.0, 0.0)), (2.0, 0.0));
        let (rp, rm) = horizon_radii(&kerr(1.0, 0.6));
        assert!((rp - 1.8).abs() < 1e-15 && (rm - 0.2).abs() < 1e-15);
        assert_eq!(horizon_radii(&kerr(2.0, 0.0)), (4.0, 0.0));
    }

    #[test]
    fn rejects_extreme_and_bad_params() {
        assert!(KerrParams::new(1.0, 1.0).is_err());
        assert!(KerrParams::new(1.0, 1.2).is_err());
        assert!(KerrParams::new(0.0, 0.0).is_err());
        assert!(KerrParams::new(1.0, -0.1).is_err());
        assert!(KerrParams::new(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn point_domain_guards() {
        let p = kerr(1.0, 0.9);
        let rp = p.outer_horizon();
        assert!(p.point(0.0, rp, 1.0, 0.0).is_err());
        assert!(p.point(0.0, 3.0, -0.1, 0.0).is_err());
        assert!(p.point(0.0, 3.0, 3.2, 0.0).is_err());
        let x = p.point(0.0, 3.0, 1.0, -0.5).unwrap();
        assert!((x.phi() - (2.0 * std::f64::consts::PI - 0.5)).abs() < 1e-15);
        let y = p.point(0.0, 3.0, 1.0, 7.0).unwrap();
        assert!((y.phi() - (7.0 - 2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn scalar_examples() {
        let p = kerr(1.0, 0.9);
        let x = p.point(0.0, 2.0, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!((scalars(&p, &x).0 - 4.0).abs() < 1e-15);
        let s = kerr(1.0, 0.0);
        let y = s.point(0.0, 3.0, 1.0, 0.0).unwrap();
        assert_eq!(scalars(&s, &y).1, 3.0);
        // Delta vanishes at the horizon; evaluate through the local helper
        // because the checked constructor excludes r = r+.
        let l = Local::new(&p, p.outer_horizon(), 1.0);
        assert!(l.delta.abs() < 1e-15);
    }

    #[test]
    fn schwarzschild_coframe_is_diagonal() {
        let p = kerr(1.0, 0.0);
        let x = p.point(0.0, 4.0, 0.7, 0.3).unwrap();
        let w = coframe(&p, &x);
        let (sigma, delta) = scalars(&p, &x);
        assert!((w[0][0] - (delta / sigma).sqrt()).abs() < 1e-15);
        assert!((w[1][1] - (sigma / delta).sqrt()).abs() < 1e-15);
        assert!((w[2][3] + 4.0 * 0.7f64.sin()).abs() < 1e-15);
        assert!((w[3][2] - 4.0).abs() < 1e-15);
        assert_eq!(w[0][3], 0.0);
        assert_eq!(w[2][0], 0.0);
    }

    #[test]
    fn equatorial_w2() {
        let (r, a) = (3.0, 0.7);
        let p = kerr(1.0, a);
        let x = p.point(0.0, r, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let w = coframe(&p, &x);
        assert!((w[2][0] - a / r).abs() < 1e-15);
        assert!((w[2][3] + (r * r + a * a) / r).abs() < 1e-14);
    }

    #[test]
    fn frame_inverts_coframe() {
        let p = kerr(1.3, 0.8);
        for &(r, th) in &[(3.0, 0.4), (2.5, 1.5), (10.0, 2.9), (2.4, 0.05)] {
            let x = p.point(1.0, r, th, 2.0).unwrap();
            let e = frame(&p, &x).unwrap();
            let w = coframe(&p, &x);
            for a in 0..4 {
                for b in 0..4 {
                    let s: f64 = (0..4).map(|i| e[a][i] * w[b][i]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-12, "{a}{b}: {s}");
                }
            }
        }
    }

    #[test]
    fn frame_undefined_on_axis() {
        let p = kerr(1.0, 0.5);
        let x = p.point(0.0, 3.0, 0.0, 0.0).unwrap();
        assert!(matches!(frame(&p, &x), Err(Error::OnAxis { .. })));
        assert!(inverse_metric(&p, &x).is_err());
    }

    #[test]
    fn schwarzschild_static_observer() {
        let p = kerr(1.0, 0.0);
        let x = p.point(0.0, 5.0, 1.0, 0.0).unwrap();
        let e = frame(&p, &x).unwrap();
        assert!((e[0][0] - 1.0 / (1.0 - 2.0 / 5.0f64).sqrt()).abs() < 1e-14);
        assert_eq!(e[0][3], 0.0);
    }

    #[test]
    fn inverse_metric_is_inverse() {
        let p = kerr(1.0, 0.95);
        let x = p.point(0.0, 1.9, 1.2, 0.0).unwrap();
        let g = metric_components(&p, &x);
        let gi = inverse_metric(&p, &x).unwrap();
        let id = mat_mul(&g, &gi);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[i][j] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pnd_schwarzschild_example() {
        let p = kerr(1.0, 0.0);
        let x = p.point(0.0, 4.0, 1.1, 0.0).unwrap();
        let (ell, n) = principal_null_directions(&p, &x);
        let norm = 1.0 / (2.0f64 * 16.0 * 8.0).sqrt();
        assert!((ell.0[0] - 16.0 * norm).abs() < 1e-15);
        assert!((ell.0[1] - 8.0 * norm).abs() < 1e-15);
        assert!((n.0[1] + 8.0 * norm).abs() < 1e-15);
    }

    #[test]
    fn ergosphere_radius_limits() {
        let p = kerr(1.0, 0.8);
        assert!((p.ergosphere_radius(std::f64::consts::FRAC_PI_2) - 2.0).abs() < 1e-15);
        assert!((p.ergosphere_radius(0.0) - p.outer_horizon()).abs() < 1e-15);
    }

    #[test]
    fn single_precision_coframe_reproduces_metric() {
        let p = KerrParams::<f32>::new(1.0, 0.7).unwrap();
        let x = p.point(0.0, 4.0, 1.0, 0.0).unwrap();
        let w = coframe(&p, &x);
        let g = metric_components(&p, &x);
        let eta = [1.0f32, -1.0, -1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                let s: f32 = (0..4).map(|a| eta[a] * w[a][i] * w[a][j]).sum();
                assert!((s - g[i][j]).abs() <= 1e-5 * g[i][j].abs().max(1.0));
            }
        }
    }
}
