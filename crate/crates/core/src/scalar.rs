//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
///
/// All math goes through [`RealField`] so that method calls such as
/// `x.sqrt()` resolve unambiguously.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + LowerExp + Debug + Default
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the concrete type.
    fn machine_eps() -> Self;

    /// Clamp a requested tolerance so it is attainable in this precision.
    #[inline]
    fn attainable(tol: f64) -> Self {
        let floor = Self::machine_eps() * Self::lit(64.0);
        let t = Self::lit(tol);
        if t < floor {
            floor
        } else {
            t
        }
    }
}

impl Scalar for f32 {
    fn machine_eps() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    fn machine_eps() -> Self {
        f64::EPSILON
    }
}

/// Norm ratio `num / den` that treats a vanishing denominator as "nothing to compare".
#[inline]
pub(crate) fn ratio<T: Scalar>(num: T, den: T) -> T {
    if den > T::zero() {
        num / den
    } else if num > T::zero() {
        T::max_value().unwrap_or_else(T::one)
    } else {
        T::zero()
    }
}
