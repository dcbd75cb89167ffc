//! Exact coefficient rings for chain-level computations.
//!
//! Everything downstream (matrices, complexes, homotopy limits) is generic
//! over [`Ring`]. Two rings are provided: arbitrary-precision integers and
//! exact rationals. No floating point is admitted anywhere; connectivity
//! answers must be exact.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, Signed};
use num_traits::{One, Zero};

use crate::error::Error;

/// Coefficient ring with enough Euclidean structure to run Smith reduction.
///
/// `div_rem` must satisfy `a = q*b + r` with `pivot_size(r) < pivot_size(b)`
/// whenever `b != 0`; over a field the remainder is always zero.
pub trait Ring:
    Clone
    + PartialEq
    + Eq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    /// Tag used in JSON interchange ("Z" or "Q").
    const NAME: &'static str;

    /// Fields admit shortcuts in Smith reduction: every nonzero entry is a
    /// unit, so no divisibility bookkeeping is needed.
    const IS_FIELD: bool;

    /// Pivot-size measure; Smith reduction always picks a nonzero entry of
    /// least size, which keeps integer coefficients from exploding.
    type Size: Ord;

    fn pivot_size(&self) -> Self::Size;

    fn is_unit(&self) -> bool;

    /// Euclidean division, remainder strictly smaller in pivot size.
    fn div_rem(&self, rhs: &Self) -> (Self, Self);

    /// Multiplicative inverse, when one exists in the ring.
    fn inverse(&self) -> Option<Self>;

    /// A unit `u` such that `u * self` is the preferred associate
    /// (nonnegative integer, or `1` for a nonzero rational).
    fn normalizing_unit(&self) -> Self;

    /// Reports an invariant factor as a positive integer, for torsion
    /// bookkeeping. `None` when the element is a unit or the ring has no
    /// integer content to report.
    fn torsion_value(&self) -> Option<BigUint>;

    fn from_i64(v: i64) -> Self;

    /// Parses the JSON string form: decimal integers, or `p/q`.
    fn parse(s: &str) -> Result<Self, Error>;

    /// Renders the JSON string form.
    fn render(&self) -> String;
}

impl Ring for BigInt {
    const NAME: &'static str = "Z";

    const IS_FIELD: bool = false;

    type Size = BigUint;

    fn pivot_size(&self) -> BigUint {
        self.magnitude().clone()
    }

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }

    fn div_rem(&self, rhs: &Self) -> (Self, Self) {
        // Symmetric remainder: |r| <= |rhs|/2, which speeds up pivoting.
        let (mut q, mut r) = Integer::div_rem(self, rhs);
        if r.magnitude() * 2u32 > *rhs.magnitude() {
            if (r.sign() == Sign::Minus) == (rhs.sign() == Sign::Minus) {
                q += BigInt::one();
                r -= rhs.clone();
            } else {
                q -= BigInt::one();
                r += rhs.clone();
            }
        }
        (q, r)
    }

    fn inverse(&self) -> Option<Self> {
        if Ring::is_unit(self) {
            Some(self.clone())
        } else {
            None
        }
    }

    fn normalizing_unit(&self) -> Self {
        if self.sign() == Sign::Minus {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }

    fn torsion_value(&self) -> Option<BigUint> {
        if self.is_zero() || Ring::is_unit(self) {
            None
        } else {
            Some(self.magnitude().clone())
        }
    }

    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn parse(s: &str) -> Result<Self, Error> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::BadEntry(s.to_string()))
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Ring for BigRational {
    const NAME: &'static str = "Q";

    const IS_FIELD: bool = true;

    // Every nonzero rational divides every other, so all pivots are equal.
    type Size = ();

    fn pivot_size(&self) {}

    fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    fn div_rem(&self, rhs: &Self) -> (Self, Self) {
        (self / rhs, BigRational::zero())
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn normalizing_unit(&self) -> Self {
        if self.is_zero() {
            BigRational::one()
        } else {
            self.recip()
        }
    }

    fn torsion_value(&self) -> Option<BigUint> {
        None
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = num
            .parse::<BigInt>()
            .map_err(|_| Error::BadEntry(s.to_string()))?;
        let den = den
            .parse::<BigInt>()
            .map_err(|_| Error::BadEntry(s.to_string()))?;
        if den.is_zero() {
            return Err(Error::BadEntry(s.to_string()));
        }
        Ok(BigRational::new(num, den))
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Arbitrary-precision integer coefficients.
pub type Int = BigInt;
/// Exact rational coefficients.
pub type Rat = BigRational;

/// Builds a rational from an integer literal.
pub fn rat(v: i64) -> Rat {
    Rat::from_i64(v)
}

/// Builds an integer coefficient from a literal.
pub fn int(v: i64) -> Int {
    Int::from_i64(v)
}
