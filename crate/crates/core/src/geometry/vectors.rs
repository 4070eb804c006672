use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::{coframe, frame, metric_components, KerrParams, SpacetimePoint};
use crate::error::Result;
use crate::scalar::Real;

/// Components in the symmetric orthonormal frame, indices `a = 0..3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector<T>(pub [T; 4]);

/// Components in the coordinate basis `(d/dt, d/dr, d/dtheta, d/dphi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoordVector<T>(pub [T; 4]);

impl<T: Real> FrameVector<T> {
    pub fn new(c0: T, c1: T, c2: T, c3: T) -> Self {
        Self([c0, c1, c2, c3])
    }

    pub fn zero() -> Self {
        Self([T::zero(); 4])
    }

    /// Minkowski product with `eta = diag(1, -1, -1, -1)`.
    pub fn eta_dot(&self, other: &Self) -> T {
        let (u, v) = (&self.0, &other.0);
        u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]
    }

    pub fn eta_norm2(&self) -> T {
        self.eta_dot(self)
    }

    /// Legs 1, 2, 3.
    pub fn spatial(&self) -> [T; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (0..4).fold(T::zero(), |m, i| m.max((self.0[i] - other.0[i]).abs()))
    }

    /// Needs the frame, so fails on the axis.
    pub fn to_coord(&self, params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Result<CoordVector<T>> {
        let e = frame(params, point)?;
        let mut out = [T::zero(); 4];
        for (a, row) in e.iter().enumerate() {
            for i in 0..4 {
                out[i] = out[i] + self.0[a] * row[i];
            }
        }
        Ok(CoordVector(out))
    }
}

impl<T: Real> CoordVector<T> {
    pub fn new(ct: T, cr: T, cth: T, cph: T) -> Self {
        Self([ct, cr, cth, cph])
    }

    pub fn metric_dot(&self, params: &KerrParams<T>, point: &SpacetimePoint<T>, other: &Self) -> T {
        let g = metric_components(params, point);
        let mut s = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                s = s + g[i][j] * self.0[i] * other.0[j];
            }
        }
        s
    }

    pub fn to_frame(&self, params: &KerrParams<T>, point: &SpacetimePoint<T>) -> FrameVector<T> {
        let w = coframe(params, point);
        let mut out = [T::zero(); 4];
        for (a, row) in w.iter().enumerate() {
            out[a] = (0..4).fold(T::zero(), |s, i| s + row[i] * self.0[i]);
        }
        FrameVector(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (0..4).fold(T::zero(), |m, i| m.max((self.0[i] - other.0[i]).abs()))
    }
}

macro_rules! vector_ops {
    ($ty:ident) => {
        impl<T: Real> Add for $ty<T> {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                $ty(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
            }
        }
        impl<T: Real> Sub for $ty<T> {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                $ty(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
            }
        }
        impl<T: Real> Neg for $ty<T> {
            type Output = Self;
            fn neg(self) -> Self {
                $ty(self.0.map(|x| -x))
            }
        }
        impl<T: Real> Mul<T> for $ty<T> {
            type Output = Self;
            fn mul(self, k: T) -> Self {
                $ty(self.0.map(|x| x * k))
            }
        }
        impl<T> Index<usize> for $ty<T> {
            type Output = T;
            fn index(&self, i: usize) -> &T {
                &self.0[i]
            }
        }
        impl<T> IndexMut<usize> for $ty<T> {
            fn index_mut(&mut self, i: usize) -> &mut T {
                &mut self.0[i]
            }
        }
    };
}

vector_ops!(FrameVector);
vector_ops!(CoordVector);
