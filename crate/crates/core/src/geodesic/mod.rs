//! Carter-separated null geodesics.
//!
//! The first-order equations
//!
//! ```text
//! Sigma dr/ds     = ±sqrt(R(r))
//! Sigma dtheta/ds = ±sqrt(Theta(theta))
//! ```
//!
//! are integrated in the equivalent smooth form `Sigma dr/ds = u_r`,
//! `du_r/ds = R'(r) / (2 Sigma)` (and likewise for `theta`), so that turning
//! points are ordinary sign changes of `u_r` and `u_theta`.

mod trajectory;

pub use trajectory::{integrate, Event, EventKind, StepDiagnostics, Termination, Trajectory, TrajectoryOptions};

use crate::error::{Error, Result};
use crate::geometry::{FrameVector, KerrParams, Local, SpacetimePoint};
use crate::scalar::{lit, Real};

/// Smallest Carter constant accepted by the frame construction.
pub const MIN_FRAME_KAPPA: f64 = 1e-12;

/// Relative slack allowed when a potential is slightly negative.
pub const REGION_TOL: f64 = 1e-9;

/// Energy `E = p_t`, axial angular momentum `Phi = -p_phi` and Carter
/// constant `kappa` of a null geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedSet<T> {
    energy: T,
    angular_momentum: T,
    carter: T,
}

impl<T: Real> ConservedSet<T> {
    /// Requires `E > 0` (future-directed photons) and `kappa >= 0`.
    pub fn new(energy: T, angular_momentum: T, carter: T) -> Result<Self> {
        if !(energy.is_finite() && energy > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "energy must be positive and finite (got {energy})"
            )));
        }
        if !angular_momentum.is_finite() {
            return Err(Error::InvalidArgument("angular momentum is not finite".into()));
        }
        if !(carter.is_finite() && carter >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "Carter constant must be non-negative (got {carter})"
            )));
        }
        Ok(Self {
            energy,
            angular_momentum,
            carter,
        })
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn angular_momentum(&self) -> T {
        self.angular_momentum
    }

    pub fn carter(&self) -> T {
        self.carter
    }

    /// Fails when `kappa` is too small for the parallel frame.
    pub fn require_frame(&self) -> Result<()> {
        if self.carter < lit(MIN_FRAME_KAPPA) {
            Err(Error::DegenerateCarter {
                kappa: self.carter.to_f64().unwrap_or(f64::NAN),
            })
        } else {
            Ok(())
        }
    }
}

/// `R(r)`, `Theta(theta)`, `P(r)` and `D(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potentials<T> {
    pub radial: T,
    pub polar: T,
    pub p: T,
    pub d: T,
}

/// Evaluates the separated potentials. On the axis `D` is only defined for
/// `Phi = 0`.
pub fn potentials<T: Real>(
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
    r: T,
    theta: T,
) -> Result<Potentials<T>> {
    let l = Local::new(params, r, theta);
    potentials_local(conserved, &l)
}

pub(crate) fn potentials_local<T: Real>(c: &ConservedSet<T>, l: &Local<T>) -> Result<Potentials<T>> {
    let (e, phi, kappa) = (c.energy, c.angular_momentum, c.carter);
    let p = e * l.rho2 - l.a * phi;
    let d = if l.sin > T::zero() {
        l.a * e * l.sin - phi / l.sin
    } else if phi == T::zero() {
        T::zero()
    } else {
        return Err(Error::AxisWithAngularMomentum {
            phi: phi.to_f64().unwrap_or(f64::NAN),
        });
    };
    Ok(Potentials {
        radial: p * p - l.delta * kappa,
        polar: kappa - d * d,
        p,
        d,
    })
}

/// Point on a null geodesic with the branches of `±sqrt(R)`, `±sqrt(Theta)`
/// and the affine parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState<T> {
    point: SpacetimePoint<T>,
    sign_r: T,
    sign_theta: T,
    s: T,
}

impl<T: Real> GeodesicState<T> {
    pub fn new(point: SpacetimePoint<T>, sign_r: T, sign_theta: T, s: T) -> Result<Self> {
        for (name, v) in [("sign_r", sign_r), ("sign_theta", sign_theta)] {
            if v.abs() != T::one() {
                return Err(Error::InvalidArgument(format!("{name} must be +1 or -1 (got {v})")));
            }
        }
        Ok(Self {
            point,
            sign_r,
            sign_theta,
            s,
        })
    }

    pub fn point(&self) -> &SpacetimePoint<T> {
        &self.point
    }

    pub fn sign_r(&self) -> T {
        self.sign_r
    }

    pub fn sign_theta(&self) -> T {
        self.sign_theta
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn r(&self) -> T {
        self.point.r()
    }

    pub fn theta(&self) -> T {
        self.point.theta()
    }

    /// Checks that the state lies in the allowed region `R >= 0`,
    /// `Theta >= 0`.
    pub fn validate(&self, conserved: &ConservedSet<T>, params: &KerrParams<T>) -> Result<()> {
        branch(self, conserved, params).map(|_| ())
    }
}

/// Local geometry plus signed square roots of the potentials.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Branch<T> {
    pub l: Local<T>,
    pub pot: Potentials<T>,
    /// `sign_r * sqrt(R)`
    pub sr: T,
    /// `sign_theta * sqrt(Theta)`
    pub st: T,
}

pub(crate) fn branch<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<Branch<T>> {
    let l = Local::at(params, &state.point);
    let pot = potentials_local(conserved, &l)?;
    let tol = lit::<T>(REGION_TOL);
    let kappa = conserved.carter;
    let r_scale = pot.p * pot.p + l.delta * kappa;
    if pot.radial < -tol * r_scale {
        return Err(Error::ForbiddenRegion {
            which: "R",
            value: pot.radial.to_f64().unwrap_or(f64::NAN),
        });
    }
    let t_scale = (kappa + pot.d * pot.d).max(conserved.energy * conserved.energy * l.a * l.a);
    if pot.polar < -tol * t_scale {
        return Err(Error::ForbiddenRegion {
            which: "Theta",
            value: pot.polar.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(Branch {
        l,
        pot,
        sr: state.sign_r * pot.radial.max(T::zero()).sqrt(),
        st: state.sign_theta * pot.polar.max(T::zero()).sqrt(),
    })
}

/// `dt/ds` and `dphi/ds`, which depend on position only.
pub(crate) fn t_phi_rates<T: Real>(c: &ConservedSet<T>, l: &Local<T>) -> (T, T) {
    let two = lit::<T>(2.0);
    let (e, phi) = (c.energy, c.angular_momentum);
    let s2 = l.sin * l.sin;
    let sd = l.sigma * l.delta;
    let tdot = (e * (l.rho2 * l.rho2 - l.delta * l.a * l.a * s2) - two * l.m * l.r * l.a * phi) / sd;
    let mut phidot = two * l.m * l.r * l.a * e;
    if phi != T::zero() {
        phidot = phidot + (l.sigma - two * l.m * l.r) * phi / s2;
    }
    (tdot, phidot / sd)
}

/// Coordinate velocity `(dt/ds, dr/ds, dtheta/ds, dphi/ds)`.
pub fn rhs<T: Real>(state: &GeodesicState<T>, conserved: &ConservedSet<T>, params: &KerrParams<T>) -> Result<[T; 4]> {
    let b = branch(state, conserved, params)?;
    let (tdot, phidot) = t_phi_rates(conserved, &b.l);
    Ok([tdot, b.sr / b.l.sigma, b.st / b.l.sigma, phidot])
}

/// Tangent in the symmetric frame:
/// `K = (P/sqrt(Delta), ±sqrt(R)/sqrt(Delta), D, ±sqrt(Theta)) / sqrt(Sigma)`.
pub fn tangent_frame_components<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<FrameVector<T>> {
    let b = branch(state, conserved, params)?;
    Ok(tangent_from_branch(&b))
}

pub(crate) fn tangent_from_branch<T: Real>(b: &Branch<T>) -> FrameVector<T> {
    let rs = b.l.sigma.sqrt();
    let rd = b.l.delta.sqrt();
    FrameVector([b.pot.p / (rd * rs), b.sr / (rd * rs), b.pot.d / rs, b.st / rs])
}

/// Right-hand side of the smooth system `y = (t, r, theta, phi, u_r, u_theta)`.
pub(crate) fn smooth_rhs<T: Real>(c: &ConservedSet<T>, params: &KerrParams<T>, y: &[T; 6]) -> [T; 6] {
    let l = Local::new(params, y[1], y[2]);
    let two = lit::<T>(2.0);
    let (e, phi, kappa) = (c.energy, c.angular_momentum, c.carter);
    let (tdot, phidot) = t_phi_rates(c, &l);
    let p = e * l.rho2 - l.a * phi;
    let dr_pot = lit::<T>(4.0) * e * l.r * p - two * (l.r - l.m) * kappa;
    let du_theta = if l.sin > T::zero() {
        let d = l.a * e * l.sin - phi / l.sin;
        let dd = l.cos * (l.a * e + phi / (l.sin * l.sin));
        -d * dd / l.sigma
    } else {
        T::zero()
    };
    [
        tdot,
        y[4] / l.sigma,
        y[5] / l.sigma,
        phidot,
        dr_pot / (two * l.sigma),
        du_theta,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn setup() -> (KerrParams<f64>, ConservedSet<f64>) {
        (
            KerrParams::<f64>::new(1.0, 0.9).unwrap(),
            ConservedSet::new(1.0, 3.0, 12.0).unwrap(),
        )
    }

    #[test]
    fn equatorial_potentials() {
        let (p, c) = setup();
        let pot = potentials(&c, &p, 5.0, FRAC_PI_2).unwrap();
        assert!((pot.d - (0.9 - 3.0)).abs() < 1e-15);
        assert!((pot.polar - (12.0 - 2.1 * 2.1)).abs() < 1e-13);
    }

    #[test]
    fn horizon_probe_radial_potential() {
        let (p, c) = setup();
        let rp = p.outer_horizon();
        let pot = potentials(&c, &p, rp, 1.0).unwrap();
        assert!((pot.radial - pot.p * pot.p).abs() < 1e-12);
        assert!(pot.radial >= 0.0);
    }

    #[test]
    fn axis_limit() {
        let p = KerrParams::<f64>::new(1.0, 0.9).unwrap();
        let c = ConservedSet::new(1.0, 0.0, 5.0).unwrap();
        let pot = potentials(&c, &p, 4.0, 0.0).unwrap();
        assert_eq!(pot.d, 0.0);
        assert_eq!(pot.polar, 5.0);
        let near = potentials(&c, &p, 4.0, 1e-9).unwrap();
        assert!((near.polar - 5.0).abs() < 1e-15);
        let bad = ConservedSet::new(1.0, 1.0, 5.0).unwrap();
        assert!(matches!(
            potentials(&bad, &p, 4.0, 0.0),
            Err(Error::AxisWithAngularMomentum { .. })
        ));
        assert!(potentials(&bad, &p, 4.0, std::f64::consts::PI).is_err());
    }

    #[test]
    fn equatorial_photon_has_no_polar_motion() {
        let p = KerrParams::<f64>::new(1.0, 0.5).unwrap();
        let c = ConservedSet::new(1.0, 2.0, (0.5f64 - 2.0).powi(2)).unwrap();
        let x = p.point(0.0, 10.0, FRAC_PI_2, 0.0).unwrap();
        let st = GeodesicState::new(x, -1.0, 1.0, 0.0).unwrap();
        let v = rhs(&st, &c, &p).unwrap();
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn schwarzschild_azimuthal_rate() {
        let p = KerrParams::<f64>::new(1.0, 0.0).unwrap();
        let c = ConservedSet::new(1.0, 2.5, 10.0).unwrap();
        let (r, th) = (7.0, 1.1);
        let x = p.point(0.0, r, th, 0.0).unwrap();
        let st = GeodesicState::new(x, 1.0, 1.0, 0.0).unwrap();
        let v = rhs(&st, &c, &p).unwrap();
        let want = 2.5 / (r * r * th.sin().powi(2));
        assert!((v[3] - want).abs() < 1e-15);
    }

    #[test]
    fn tangent_is_null_and_matches_rhs() {
        let (p, c) = setup();
        let x = p.point(0.0, 20.0, 1.57, 0.0).unwrap();
        let st = GeodesicState::new(x, -1.0, -1.0, 0.0).unwrap();
        let k = tangent_frame_components(&st, &c, &p).unwrap();
        assert!(k.eta_norm2().abs() < 1e-12);
        let kc = k.to_coord(&p, &x).unwrap();
        let v = rhs(&st, &c, &p).unwrap();
        for i in 0..4 {
            assert!((kc.0[i] - v[i]).abs() < 1e-10 * v[i].abs().max(1.0));
        }
        assert!(k.0[1] < 0.0 && k.0[3] < 0.0);
    }

    #[test]
    fn forbidden_region_is_rejected() {
        let (p, c) = setup();
        // Theta < 0 close to the axis for Phi != 0.
        let x = p.point(0.0, 20.0, 0.05, 0.0).unwrap();
        let st = GeodesicState::new(x, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            rhs(&st, &c, &p),
            Err(Error::ForbiddenRegion { which: "Theta", .. })
        ));
    }

    #[test]
    fn conserved_set_guards() {
        assert!(ConservedSet::new(0.0, 1.0, 1.0).is_err());
        assert!(ConservedSet::new(1.0, 1.0, -1.0).is_err());
        assert!(ConservedSet::new(1.0, f64::NAN, 1.0).is_err());
        let c = ConservedSet::new(1.0, 0.0, 0.0).unwrap();
        assert!(c.require_frame().is_err());
    }

    #[test]
    fn signs_must_be_unit() {
        let p = KerrParams::<f64>::new(1.0, 0.5).unwrap();
        let x = p.point(0.0, 10.0, 1.0, 0.0).unwrap();
        assert!(GeodesicState::new(x, 0.5, 1.0, 0.0).is_err());
    }
}
