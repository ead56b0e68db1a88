//! Scalar abstractions.
//!
//! Operator construction and certification only need field arithmetic, so
//! they are written against [`Scalar`], which is implemented for `f32`, `f64`
//! and the exact [`BigRational`]. Everything that evaluates transcendental
//! functions or integrates in time is written against [`Real`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, Num, NumCast, ToPrimitive};

/// Field arithmetic plus the few conversions the operator tables need.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// Exact conversion of the rational `num/den`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn abs_value(&self) -> Self;

    /// Lossy view used for pivoting decisions and reporting.
    fn to_f64_lossy(&self) -> f64;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Floating-point scalars.
pub trait Real: Scalar + Float + FloatConst + Copy + Display + LowerExp + Sum {
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("literal representable in Real")
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $f / den as $f
            }
            fn abs_value(&self) -> Self {
                <$f>::abs(*self)
            }
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
        impl Real for $f {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn abs_value(&self) -> Self {
        num_traits::Signed::abs(self)
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Arithmetic needed by the dense LU factorisation: any [`Scalar`] and the
/// complex numbers over a [`Real`].
pub trait Field: Clone + Debug + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// Magnitude used to pick pivots.
    fn pivot_size(&self) -> f64;
}

impl<T: Scalar> Field for T {
    fn pivot_size(&self) -> f64 {
        self.to_f64_lossy().abs()
    }
}

impl<T: Real> Field for Complex<T> {
    fn pivot_size(&self) -> f64 {
        self.norm().to_f64_lossy()
    }
}

/// Shorthand for `T::lit`.
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
