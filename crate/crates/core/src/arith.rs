//! Exact integer and rational primitives.
//!
//! Everything downstream (the constants lambda_n, r(n), the small-n table)
//! is carried as [`ExactRational`]; square roots of integers only ever appear
//! through [`isqrt`] / [`ceil_sqrt`], so no floating point enters a bound.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `floor(sqrt(n))` by Newton iteration in 128-bit arithmetic.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let n = n as u128;
    let bits = 128 - n.leading_zeros();
    // 2^ceil(bits/2) >= sqrt(n), so the iteration decreases monotonically.
    let mut x: u128 = 1 << bits.div_ceil(2);
    loop {
        let next = (x + n / x) / 2;
        if next >= x {
            break;
        }
        x = next;
    }
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x as u64
}

/// Least `s` with `s^2 >= n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let s = isqrt(n);
    if s * s == n {
        s
    } else {
        s + 1
    }
}

/// `floor(sqrt(n))` for arbitrary-precision `n`.
pub fn isqrt_big(n: &BigUint) -> BigUint {
    if n.bits() <= 1 {
        return n.clone();
    }
    let mut x = BigUint::one() << n.bits().div_ceil(2);
    loop {
        let next = (&x + n / &x) >> 1u32;
        if next >= x {
            break;
        }
        x = next;
    }
    while &x * &x > *n {
        x -= 1u32;
    }
    loop {
        let up = &x + 1u32;
        if &up * &up > *n {
            break;
        }
        x = up;
    }
    x
}

/// Least `s` with `s^2 >= n`, arbitrary precision.
pub fn ceil_sqrt_big(n: &BigUint) -> BigUint {
    let s = isqrt_big(n);
    if &s * &s == *n {
        s
    } else {
        s + 1u32
    }
}

/// `n = s^2 + t` with `s = floor(sqrt(n))`, hence `0 <= t <= 2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SqrtDecomposition {
    pub s: u64,
    pub t: u64,
}

pub fn sqrt_decompose(n: u64) -> SqrtDecomposition {
    let s = isqrt(n);
    SqrtDecomposition { s, t: n - s * s }
}

/// Canonical arbitrary-precision rational: positive denominator, reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(ExactRational(BigRational::new(numer.into(), denom)))
    }

    /// Panicking constructor for literal fractions with a nonzero denominator.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn ceil(&self) -> BigInt {
        self.numer().div_ceil(self.denom())
    }

    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(ExactRational(self.0.recip()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` fractional digits, rounded half away
    /// from zero. Exact: no float intermediate.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = self.numer() * &scale;
        let (q, r) = scaled.abs().div_rem(self.denom());
        let q = if r * 2u32 >= *self.denom() {
            q + 1u32
        } else {
            q
        };
        let negative = self.numer().sign() == Sign::Minus && !q.is_zero();
        format_fixed(&q, digits, negative)
    }
}

/// Renders `|q| / 10^digits` with an optional sign.
pub(crate) fn format_fixed(q: &BigInt, digits: u32, negative: bool) -> String {
    let mut body = q.abs().to_string();
    let digits = digits as usize;
    if body.len() <= digits {
        body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
    }
    let (int_part, frac_part) = body.split_at(body.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Least integer `>= q`.
pub fn ceil_rational(q: &ExactRational) -> BigInt {
    q.ceil()
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<u64> for ExactRational {
    fn from(v: u64) -> Self {
        Self::integer(v)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::integer(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::integer(v)
    }
}

impl PartialEq<u64> for ExactRational {
    fn eq(&self, other: &u64) -> bool {
        self.is_integer() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<u64> for ExactRational {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

// Division by zero panics, as for the primitive integer types; use
// `recip` where the divisor is not known to be nonzero.
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl std::iter::Product for ExactRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactRational::one(), |acc, x| acc * x)
    }
}
