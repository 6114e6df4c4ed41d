//! Coefficient rings.
//!
//! Every algebraic object in the crate is generic over [`Scalar`]. Two
//! implementations exist: [`Rational`] (arbitrary precision, always reduced)
//! for identity checks, and `f64` for bound evaluations.

use core::fmt::{Debug, Display};
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational coefficient. `num_rational` keeps it in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Coefficient ring used by Grassmann elements and everything built on them.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Short name of the coefficient mode, used in reports.
    const MODE: CoefficientMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }
    fn to_f64(&self) -> f64;
    /// Division; `None` when dividing by zero.
    fn checked_div(&self, other: &Self) -> Option<Self>;
    /// `e^self` when it is representable in the ring. Exact mode only
    /// represents `e^0`.
    fn exp(&self) -> Option<Self>;

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.clone() + other.clone();
    }
}

/// Coefficient ring of an algebra context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientMode {
    Exact,
    Float,
}

impl Scalar for Rational {
    const MODE: CoefficientMode = CoefficientMode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            None
        } else {
            Some(self / other)
        }
    }
    fn exp(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            Some(One::one())
        } else {
            None
        }
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Scalar for f64 {
    const MODE: CoefficientMode = CoefficientMode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        num_traits::Float::abs(*self)
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        if *other == 0.0 {
            None
        } else {
            Some(self / other)
        }
    }
    fn exp(&self) -> Option<Self> {
        Some(num_traits::Float::exp(*self))
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
}

/// Correctly scaled conversion; plain `to_f64` on numerator and denominator
/// overflows for the factorial-sized values that show up in sweeps.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    let num = r.numer();
    let den = r.denom();
    let shift = num.bits() as i64 - den.bits() as i64;
    // bring the quotient into [2^52, 2^54) before converting
    let target = 53 - shift;
    let q = if target >= 0 {
        (num << target as usize) / den
    } else {
        num / (den << (-target) as usize)
    };
    let mant = q.to_f64().unwrap_or(f64::NAN);
    ldexp(mant, -target)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    // step in chunks so intermediate powers of two stay representable
    while e > 512 {
        x *= num_traits::Float::powi(2.0f64, 512);
        e -= 512;
    }
    while e < -512 {
        x *= num_traits::Float::powi(2.0f64, -512);
        e += 512;
    }
    x * num_traits::Float::powi(2.0f64, e as i32)
}

/// Shorthand for an exact rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational from an integer.
pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Exact conversion of a finite `f64` into a rational.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Generalised binomial coefficient `binom(r, k) = r (r-1) ... (r-k+1) / k!`.
pub fn binomial_general(r: &Rational, k: u32) -> Rational {
    let mut acc: Rational = One::one();
    for i in 0..k {
        acc = acc * (r - int(i as i64)) / int(i as i64 + 1);
    }
    acc
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn big(v: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_rational_converts() {
        let r = big(factorial(200)) / big(factorial(198));
        assert_eq!(rational_to_f64(&r), 200.0 * 199.0);
        let tiny = <Rational as One>::one() / big(factorial(170));
        let v = rational_to_f64(&tiny);
        assert!(v > 0.0 && v < 1e-306);
    }

    #[test]
    fn generalised_binomials() {
        assert_eq!(binomial_general(&rat(1, 2), 0), int(1));
        assert_eq!(binomial_general(&rat(1, 2), 1), rat(1, 2));
        assert_eq!(binomial_general(&rat(1, 2), 2), rat(-1, 8));
        assert_eq!(binomial_general(&rat(-1, 2), 2), rat(3, 8));
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
    }
}
