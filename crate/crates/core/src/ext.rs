//! Scalars extended with the two infinities.

use std::fmt;
use std::ops::{Add, Sub};

use crate::scalar::Scalar;

/// A scalar extended with `-inf` and `+inf`.
///
/// The derived order puts `NegInf` below every finite value and `PosInf`
/// above. Addition is max-plus addition: `NegInf` absorbs everything,
/// including `PosInf`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ext<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> Ext<T> {
    pub fn zero() -> Self {
        Ext::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_finite(self) -> Option<T> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Shift by a finite amount.
    pub fn shift(&self, h: &T) -> Self {
        match self {
            Ext::Finite(v) => Ext::Finite(v.clone() + h.clone()),
            other => other.clone(),
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Maximum over an iterator; `-inf` for an empty one.
    pub fn max_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Ext::NegInf, Ext::max)
    }

    /// Minimum over an iterator; `+inf` for an empty one.
    pub fn min_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Ext::PosInf, Ext::min)
    }
}

impl<T> From<T> for Ext<T> {
    fn from(v: T) -> Self {
        Ext::Finite(v)
    }
}

impl<T: Scalar> Add for Ext<T> {
    type Output = Ext<T>;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
        }
    }
}

impl<T: Scalar> Sub<&T> for &Ext<T> {
    type Output = Ext<T>;

    fn sub(self, rhs: &T) -> Ext<T> {
        match self {
            Ext::Finite(a) => Ext::Finite(a.clone() - rhs.clone()),
            other => other.clone(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Ext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::Finite(v) => v.fmt(f),
            Ext::PosInf => f.write_str("inf"),
        }
    }
}
