use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar used throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Lossy for `f32`, never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `(3π + 2) / (2π)`: threshold activity prefactor for a SQUID whose total
/// inductance is `(Φ0/Ic)·(3π+2)/(4π)`.
#[inline]
pub fn activity_prefactor<T: Scalar>() -> T {
    let pi = T::PI();
    (T::lit(3.0) * pi + T::lit(2.0)) / (T::lit(2.0) * pi)
}

/// `(3π + 2) / (4π)`: total SQUID inductance in units of `Φ0/Ic`.
#[inline]
pub fn total_inductance_factor<T: Scalar>() -> T {
    activity_prefactor::<T>() / T::lit(2.0)
}
