//! Scalar abstraction for the simulation math.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar used throughout the crate. Implemented by `f32`
/// and `f64`; `f64` is the intended working type (several tolerances in
/// this crate, e.g. the Richardson gate of the Bloch integrator, are out
/// of reach for `f32`).
pub trait Real:
    Float + FloatConst + NumAssign + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + 'static
{
}

/// Pulls an `f64` literal into the working scalar type.
#[inline]
pub(crate) fn rf<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Lossy view of a scalar as `f64`, for diagnostics and serialization.
#[inline]
pub(crate) fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
