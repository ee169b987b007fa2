//! Exact rationals and the small scalar abstraction shared by the exact and
//! floating-point evaluation paths.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `"num/den"` rendering used by every text output. Integers keep the `/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a plain integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float. Every finite `f64` is a dyadic rational.
pub fn from_f64_exact(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Arithmetic shared by the float and exact paths. Coefficients live as
/// [`Rational`]s and get converted at evaluation time.
pub trait Scalar:
    Clone
    + Send
    + Sync
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// `k / 2`, the only non-integer points the plans ever produce.
    fn half(k: i64) -> Self;
    fn from_i64(k: i64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn half(k: i64) -> Self {
        k as f64 / 2.0
    }
    fn from_i64(k: i64) -> Self {
        k as f64
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn half(k: i64) -> Self {
        rat(k, 2)
    }
    fn from_i64(k: i64) -> Self {
        int(k)
    }
}
