use super::{KerrParams, Local, SpacetimePoint, PH_IDX as P, R_IDX as R, TH_IDX as H, T_IDX as T0};
use crate::error::Result;
use crate::scalar::{lit, Real};

/// `gamma[i][j][k]` is the connection coefficient with upper index `i`.
pub type Christoffel<T> = [[[T; 4]; 4]; 4];

/// Levi-Civita connection in Boyer–Lindquist coordinates. Several symbols
/// carry `cot(theta)`, so the axis is excluded.
pub fn christoffel<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Result<Christoffel<T>> {
    let l = Local::at(params, point);
    l.require_off_axis(point.theta())?;
    Ok(christoffel_local(&l))
}

pub(crate) fn christoffel_local<T: Real>(l: &Local<T>) -> Christoffel<T> {
    let two = lit::<T>(2.0);
    let (m, a, r, s, c) = (l.m, l.a, l.r, l.sin, l.cos);
    let (sig, del) = (l.sigma, l.delta);
    let (a2, r2, s2, c2) = (a * a, r * r, s * s, c * c);
    let sig2 = sig * sig;
    let sig3 = sig2 * sig;
    let q = r2 - a2 * c2;
    let cot = c / s;
    let z = T::zero();
    let mut g = [[[z; 4]; 4]; 4];
    let mut set = |i: usize, j: usize, k: usize, v: T| {
        g[i][j][k] = v;
        g[i][k][j] = v;
    };

    set(T0, R, T0, m * l.rho2 * q / (sig2 * del));
    set(T0, H, T0, -two * m * r * a2 * c * s / sig2);
    set(
        T0,
        R,
        P,
        a * m * s2 * (a2 * a2 * c2 - r2 * a2 * c2 - r2 * a2 - lit::<T>(3.0) * r2 * r2) / (sig2 * del),
    );
    set(T0, H, P, two * m * r * a2 * a * s2 * s * c / sig2);

    set(R, T0, T0, m * q * del / sig3);
    set(R, P, T0, -a * m * s2 * q * del / sig3);
    set(R, R, R, (r * a2 * s2 - m * q) / (sig * del));
    set(R, H, R, -a2 * c * s / sig);
    set(R, H, H, -r * del / sig);
    set(R, P, P, del * s2 * (m * a2 * s2 * q - r * sig2) / sig3);

    set(H, T0, T0, -two * m * r * a2 * s * c / sig3);
    set(H, P, T0, two * m * r * a * s * c * l.rho2 / sig3);
    set(H, R, R, a2 * s * c / (sig * del));
    set(H, R, H, r / sig);
    set(H, H, H, -a2 * s * c / sig);
    set(H, P, P, -c * s * (sig2 * del + two * m * r * l.rho2 * l.rho2) / sig3);

    set(P, R, T0, m * a * q / (sig2 * del));
    set(P, H, T0, -two * m * r * a * cot / sig2);
    set(P, R, P, ((r - m) * sig2 - m * l.rho2 * q) / (sig2 * del));
    set(P, H, P, cot + two * m * r * a2 * c * s / sig2);
    g
}

/// `gamma^i_jk u^j v^k`.
pub fn contract<T: Real>(gamma: &Christoffel<T>, u: &[T; 4], v: &[T; 4]) -> [T; 4] {
    std::array::from_fn(|i| {
        let mut acc = T::zero();
        for j in 0..4 {
            if u[j] == T::zero() {
                continue;
            }
            for k in 0..4 {
                acc = acc + gamma[i][j][k] * u[j] * v[k];
            }
        }
        acc
    })
}
