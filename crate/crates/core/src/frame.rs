//! Closed-form parallel-propagated frame along a null geodesic.
//!
//! Along a geodesic with tangent `K` the vectors
//!
//! ```text
//! Z = -f(K)/sqrt(kappa),  Y,  X
//! ```
//!
//! built from the Killing–Yano form `f` are parallel, with `Y` and `X` given
//! in closed form in terms of the affine parameter `s` (taken to vanish at the
//! emission event). All components refer to the symmetric frame.

use crate::error::Result;
use crate::geodesic::{branch, tangent_from_branch, Branch, ConservedSet, GeodesicState, Trajectory};
use crate::geometry::{FrameVector, KerrParams};
use crate::output::fmt_f;
use crate::scalar::{lit, Real};

/// `2 beta_± = E^2 s^2 ± Sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPair<T> {
    pub plus: T,
    pub minus: T,
}

/// Orthonormal parallel frame `L(0)..L(3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelFrame<T> {
    pub legs: [FrameVector<T>; 4],
}

/// The null/spacelike quadruple `{K, X, Y, Z}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullQuad<T> {
    pub k: FrameVector<T>,
    pub x: FrameVector<T>,
    pub y: FrameVector<T>,
    pub z: FrameVector<T>,
}

/// Gram matrix the quadruple `{K, X, Y, Z}` must reproduce.
pub const QUAD_GRAM: [[f64; 4]; 4] = [
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
];

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

pub fn beta_k<T: Real>(conserved: &ConservedSet<T>, s: T) -> T {
    conserved.energy() * s
}

/// `(E^2 s^2 - r^2 + a^2 cos^2 theta) / (2 sqrt(kappa))`.
pub fn beta_y<T: Real>(
    conserved: &ConservedSet<T>,
    state: &GeodesicState<T>,
    params: &KerrParams<T>,
    s: T,
) -> Result<T> {
    conserved.require_frame()?;
    let e = conserved.energy();
    let (r, c) = (state.r(), state.theta().cos());
    let a = params.spin();
    Ok((e * e * s * s - r * r + a * a * c * c) / (lit::<T>(2.0) * conserved.carter().sqrt()))
}

pub fn beta_pair<T: Real>(
    conserved: &ConservedSet<T>,
    state: &GeodesicState<T>,
    params: &KerrParams<T>,
    s: T,
) -> BetaPair<T> {
    let e = conserved.energy();
    let (r, c) = (state.r(), state.theta().cos());
    let a = params.spin();
    let sigma = r * r + a * a * c * c;
    let es2 = e * e * s * s;
    let half = lit::<T>(0.5);
    BetaPair {
        plus: (es2 + sigma) * half,
        minus: (es2 - sigma) * half,
    }
}

fn checked<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<Branch<T>> {
    conserved.require_frame()?;
    branch(state, conserved, params)
}

fn y_from<T: Real>(b: &Branch<T>, e: T, kappa: T, s: T) -> FrameVector<T> {
    let (r, ac) = (b.l.r, b.l.a * b.l.cos);
    let (p, d) = (b.pot.p, b.pot.d);
    let es = e * s;
    let rd = b.l.delta.sqrt();
    let n = T::one() / (kappa * b.l.sigma).sqrt();
    FrameVector([
        n * (es * p - r * b.sr) / rd,
        n * (es * b.sr - r * p) / rd,
        n * (es * d + ac * b.st),
        n * (es * b.st - ac * d),
    ])
}

fn x_from<T: Real>(b: &Branch<T>, e: T, kappa: T, s: T) -> FrameVector<T> {
    let (r, ac) = (b.l.r, b.l.a * b.l.cos);
    let (p, d) = (b.pot.p, b.pot.d);
    let es = e * s;
    let half = lit::<T>(0.5);
    let bp = (es * es + b.l.sigma) * half;
    let bm = (es * es - b.l.sigma) * half;
    let rd = b.l.delta.sqrt();
    let n = T::one() / (kappa * b.l.sigma.sqrt());
    FrameVector([
        n * (p * bp - r * es * b.sr) / rd,
        n * (b.sr * bp - r * es * p) / rd,
        n * (d * bm + ac * es * b.st),
        n * (b.st * bm - ac * es * d),
    ])
}

fn z_from<T: Real>(b: &Branch<T>, kappa: T) -> FrameVector<T> {
    let (r, ac) = (b.l.r, b.l.a * b.l.cos);
    let rd = b.l.delta.sqrt();
    let n = T::one() / (kappa * b.l.sigma).sqrt();
    FrameVector([
        n * ac * b.sr / rd,
        n * ac * b.pot.p / rd,
        n * r * b.st,
        -n * r * b.pot.d,
    ])
}

pub fn vector_y<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
    s: T,
) -> Result<FrameVector<T>> {
    let b = checked(state, conserved, params)?;
    Ok(y_from(&b, conserved.energy(), conserved.carter(), s))
}

pub fn vector_x<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
    s: T,
) -> Result<FrameVector<T>> {
    let b = checked(state, conserved, params)?;
    Ok(x_from(&b, conserved.energy(), conserved.carter(), s))
}

pub fn vector_z<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
) -> Result<FrameVector<T>> {
    let b = checked(state, conserved, params)?;
    Ok(z_from(&b, conserved.carter()))
}

/// `{K, X, Y, Z}` at the given state and affine parameter.
pub fn null_quad<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
    s: T,
) -> Result<NullQuad<T>> {
    let b = checked(state, conserved, params)?;
    Ok(quad_from(&b, conserved, s))
}

pub(crate) fn quad_from<T: Real>(b: &Branch<T>, conserved: &ConservedSet<T>, s: T) -> NullQuad<T> {
    let b = *b;
    let (e, kappa) = (conserved.energy(), conserved.carter());
    NullQuad {
        k: tangent_from_branch(&b),
        x: x_from(&b, e, kappa, s),
        y: y_from(&b, e, kappa, s),
        z: z_from(&b, kappa),
    }
}

impl<T: Real> Trajectory<T> {
    /// `{K, X, Y, Z}` at `s`, with the radial and polar roots taken from the
    /// integrated momenta.
    pub fn null_quad_at(&self, s: T) -> Result<NullQuad<T>> {
        self.conserved().require_frame()?;
        Ok(quad_from(&self.branch_at(s)?, self.conserved(), s))
    }

    pub fn frame_at(&self, s: T) -> Result<ParallelFrame<T>> {
        Ok(self.null_quad_at(s)?.frame())
    }
}

/// `L(0) = (K + X)/sqrt(2)`, `L(1) = (K - X)/sqrt(2)`, `L(2) = Y`, `L(3) = Z`.
pub fn parallel_frame<T: Real>(
    state: &GeodesicState<T>,
    conserved: &ConservedSet<T>,
    params: &KerrParams<T>,
    s: T,
) -> Result<ParallelFrame<T>> {
    Ok(null_quad(state, conserved, params, s)?.frame())
}

impl<T: Real> NullQuad<T> {
    pub fn vectors(&self) -> [FrameVector<T>; 4] {
        [self.k, self.x, self.y, self.z]
    }

    pub fn frame(&self) -> ParallelFrame<T> {
        let h = T::one() / lit::<T>(2.0).sqrt();
        ParallelFrame {
            legs: [(self.k + self.x) * h, (self.k - self.x) * h, self.y, self.z],
        }
    }

    /// Largest deviation of the scalar products from [`QUAD_GRAM`].
    pub fn gram_defect(&self) -> T {
        gram_defect(&self.vectors(), &QUAD_GRAM)
    }
}

impl<T: Real> ParallelFrame<T> {
    /// Largest deviation from `eta`-orthonormality.
    pub fn orthonormality_defect(&self) -> T {
        let mut eta = [[0.0; 4]; 4];
        for (a, row) in eta.iter_mut().enumerate() {
            row[a] = ETA[a];
        }
        gram_defect(&self.legs, &eta)
    }

    /// Debug dump in `s,a,c0,c1,c2,c3` rows (no header).
    pub fn csv_rows(&self, s: T) -> String {
        let mut out = String::new();
        for (a, leg) in self.legs.iter().enumerate() {
            out.push_str(&fmt_f(s));
            out.push_str(&format!(",{a}"));
            for c in leg.0 {
                out.push(',');
                out.push_str(&fmt_f(c));
            }
            out.push('\n');
        }
        out
    }
}

fn gram_defect<T: Real>(v: &[FrameVector<T>; 4], want: &[[f64; 4]; 4]) -> T {
    let mut worst = T::zero();
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max((v[i].eta_dot(&v[j]) - lit::<T>(want[i][j])).abs());
        }
    }
    worst
}

/// Header for the frame dump.
pub const FRAME_CSV_HEADER: &str = "s,a,c0,c1,c2,c3";
