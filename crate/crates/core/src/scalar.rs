//! Scalar abstraction shared by the special functions, quadrature and bounds.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
///
/// Everything numeric in this crate is written against this trait. The two
/// methods not covered by `num_traits::Float` are forwarded to `libm`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Natural log of |Γ(self)|.
    fn ln_gamma(self) -> Self;

    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Converts an `f64` literal. Literals in this crate are always representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal out of range for scalar type")
    }

    /// Converts a count or dimension.
    #[inline]
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count out of range for scalar type")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    /// Lossy view as `f64`, for error reporting and ordering.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

impl Real for f64 {
    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}
