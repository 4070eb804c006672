use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used throughout the crate: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into this scalar type.
    #[inline(always)]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// +1 for non-negative values (including +0), -1 otherwise.
    #[inline(always)]
    fn sign_of(x: Self) -> Self {
        if x.is_sign_negative() {
            -Self::one()
        } else {
            Self::one()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for [`Real::lit`].
#[inline(always)]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
