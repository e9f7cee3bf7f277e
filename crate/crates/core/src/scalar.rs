//! Integer scalar abstraction shared by the exact kernels.
//!
//! Every dense and sparse elimination routine is written once against [`Int`]
//! and instantiated twice: with `i64` as a machine-word fast path whose checked
//! operations report [`Overflow`], and with [`BigInt`] as the arbitrary-precision
//! fallback. Callers go through the front-end functions which retry on overflow,
//! so promotion never changes a result.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, Signed, ToPrimitive};

/// Raised by a machine-word kernel when an intermediate value leaves the word range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

pub type Checked<T> = Result<T, Overflow>;

pub trait Int:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Signed
    + Integer
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn to_bigint(&self) -> BigInt;
    fn from_bigint(v: &BigInt) -> Option<Self>;

    fn c_add(&self, rhs: &Self) -> Checked<Self> {
        self.checked_add(rhs).ok_or(Overflow)
    }

    fn c_sub(&self, rhs: &Self) -> Checked<Self> {
        self.checked_sub(rhs).ok_or(Overflow)
    }

    fn c_mul(&self, rhs: &Self) -> Checked<Self> {
        self.checked_mul(rhs).ok_or(Overflow)
    }

    /// `self - q * b`
    fn c_sub_mul(&self, q: &Self, b: &Self) -> Checked<Self> {
        self.c_sub(&q.c_mul(b)?)
    }

    fn c_neg(&self) -> Checked<Self> {
        Self::zero().c_sub(self)
    }

    fn c_abs(&self) -> Checked<Self> {
        if self.is_negative() {
            self.c_neg()
        } else {
            Ok(self.clone())
        }
    }

    fn is_unit(&self) -> bool {
        self.is_one() || (self.is_negative() && self.c_neg().map(|v| v.is_one()).unwrap_or(false))
    }

    fn of(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("every scalar type holds i64")
    }
}

impl Int for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn c_abs(&self) -> Checked<Self> {
        self.checked_abs().ok_or(Overflow)
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
}

impl Int for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn c_abs(&self) -> Checked<Self> {
        self.checked_abs().ok_or(Overflow)
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
}

impl Int for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn c_add(&self, rhs: &Self) -> Checked<Self> {
        Ok(self + rhs)
    }
    fn c_sub(&self, rhs: &Self) -> Checked<Self> {
        Ok(self - rhs)
    }
    fn c_mul(&self, rhs: &Self) -> Checked<Self> {
        Ok(self * rhs)
    }
    fn c_neg(&self) -> Checked<Self> {
        Ok(-self)
    }
    fn c_abs(&self) -> Checked<Self> {
        Ok(self.abs())
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
}

/// Converts every entry, failing if any value does not fit the target type.
pub fn convert<S: Int, T: Int>(v: &S) -> Option<T> {
    T::from_bigint(&v.to_bigint())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_overflow_is_reported() {
        assert_eq!(i64::MAX.c_add(&1), Err(Overflow));
        assert_eq!(i64::MIN.c_abs(), Err(Overflow));
        assert_eq!(3i64.c_sub_mul(&2, &5), Ok(-7));
    }

    #[test]
    fn bigint_never_overflows() {
        let big = BigInt::from(i64::MAX);
        let sq = big.c_mul(&big).unwrap();
        assert!(i64::from_bigint(&sq).is_none());
        assert_eq!(i128::from_bigint(&BigInt::from(5)), Some(5));
    }

    #[test]
    fn units() {
        assert!((-1i64).is_unit());
        assert!(BigInt::from(-1).is_unit());
        assert!(!2i64.is_unit());
        assert!(!BigInt::from(0).is_unit());
    }
}
