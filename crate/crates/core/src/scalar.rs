//! Scalar abstraction over the number types the toolkit can compute with.
//!
//! All algorithms are written against [`Scalar`]. The exact instance,
//! [`BigRational`](num_rational::BigRational), is what the theorem checks and
//! the command-line tool use; the fixed-width rational and float instances are
//! there for callers who accept overflow or rounding.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed};

pub trait Scalar:
    Num + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;

    fn from_count(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 is representable")
    }

    fn from_int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("i64 is representable")
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn ceil(&self) -> Self {
        Ratio::ceil(self)
    }

    fn from_count(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Scalar for Ratio<i64> {
    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn ceil(&self) -> Self {
        Ratio::ceil(self)
    }
}

impl Scalar for f64 {
    fn floor(&self) -> Self {
        f64::floor(*self)
    }

    fn ceil(&self) -> Self {
        f64::ceil(*self)
    }
}

impl Scalar for f32 {
    fn floor(&self) -> Self {
        f32::floor(*self)
    }

    fn ceil(&self) -> Self {
        f32::ceil(*self)
    }
}

/// Builds an exact rational `num / den`.
///
/// # Panics
///
/// Panics if `den` is zero.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an exact integer-valued rational.
pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}
