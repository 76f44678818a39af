//! Rigorous decimal enclosures for the few irrational quantities we print:
//! square roots of rationals and pi.
//!
//! An [`Enclosure`] at scale `k` holds integers `lo <= x * 10^k <= hi`.
//! Renderings refine the scale until both ends round to the same string,
//! so every printed digit is correct.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::arith::{ceil_sqrt_big, format_fixed, isqrt_big, ExactRational};

/// Guard digits added on the first attempt; doubled on each refinement.
const GUARD_DIGITS: u32 = 8;
const MAX_REFINEMENTS: u32 = 12;

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u32,
}

impl Enclosure {
    pub fn exact(x: &ExactRational, scale: u32) -> Self {
        let scaled = x.numer() * pow10(scale);
        Enclosure {
            lo: scaled.div_floor(x.denom()),
            hi: scaled.div_ceil(x.denom()),
            scale,
        }
    }

    /// Encloses `sqrt(x)` for a nonnegative rational `x`.
    ///
    /// Uses `floor(sqrt(y)) = isqrt(floor(y))` and
    /// `ceil(sqrt(y)) = ceil_sqrt(ceil(y))` for real `y >= 0`.
    pub fn sqrt(x: &ExactRational, scale: u32) -> Self {
        assert!(!x.is_negative(), "square root of a negative rational");
        let y = x.numer() * pow10(2 * scale);
        let floor_y = to_biguint(y.div_floor(x.denom()));
        let ceil_y = to_biguint(y.div_ceil(x.denom()));
        Enclosure {
            lo: BigInt::from(isqrt_big(&floor_y)),
            hi: BigInt::from(ceil_sqrt_big(&ceil_y)),
            scale,
        }
    }

    /// Encloses `1 / sqrt(x)` for a positive rational `x`.
    pub fn inv_sqrt(x: &ExactRational, scale: u32) -> Self {
        let inv = x.recip().expect("inverse square root of zero");
        Self::sqrt(&inv, scale)
    }

    /// Encloses pi via Machin's formula `pi = 16 atan(1/5) - 4 atan(1/239)`.
    pub fn pi(scale: u32) -> Self {
        let work = scale + 10;
        let one = pow10(work);
        let (a, ta) = atan_inv(5, &one);
        let (b, tb) = atan_inv(239, &one);
        // Each truncated term is off by < 1 unit and the alternating tail
        // by < 1 more.
        let err = BigInt::from(16 * (ta + 1) + 4 * (tb + 1));
        let approx = a * 16u32 - b * 4u32;
        let shift = pow10(work - scale);
        Enclosure {
            lo: (&approx - &err).div_floor(&shift),
            hi: (&approx + &err).div_ceil(&shift),
            scale,
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        assert_eq!(self.scale, other.scale);
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            scale: self.scale,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        assert_eq!(self.scale, other.scale);
        Enclosure {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
            scale: self.scale,
        }
    }

    pub fn scale_by(&self, k: u64) -> Enclosure {
        Enclosure {
            lo: &self.lo * k,
            hi: &self.hi * k,
            scale: self.scale,
        }
    }

    pub fn div_int(&self, k: u64) -> Enclosure {
        let k = BigInt::from(k);
        Enclosure {
            lo: self.lo.div_floor(&k),
            hi: self.hi.div_ceil(&k),
            scale: self.scale,
        }
    }

    /// Upper bound as an exact rational with denominator `10^scale`.
    pub fn upper(&self) -> ExactRational {
        ExactRational::new(self.hi.clone(), pow10(self.scale)).expect("nonzero")
    }

    pub fn lower(&self) -> ExactRational {
        ExactRational::new(self.lo.clone(), pow10(self.scale)).expect("nonzero")
    }
}

fn to_biguint(v: BigInt) -> BigUint {
    v.to_biguint().expect("nonnegative")
}

/// `atan(1/x) * one` by the Gregory series with truncating division;
/// returns the sum and the number of terms taken.
fn atan_inv(x: u32, one: &BigInt) -> (BigInt, u64) {
    let x2 = BigInt::from(x) * x;
    let mut power = one / x;
    let mut sum = power.clone();
    let mut k: u64 = 1;
    let mut terms = 1;
    loop {
        power /= &x2;
        let term = &power / (2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
        terms += 1;
    }
    (sum, terms)
}

fn round_half_away(v: &BigInt, drop: u32) -> BigInt {
    let d = pow10(drop);
    let (q, r) = v.abs().div_rem(&d);
    let q = if r * 2u32 >= d { q + 1u32 } else { q };
    if v.sign() == Sign::Minus {
        -q
    } else {
        q
    }
}

/// Correctly rounded (half away from zero) decimal with `digits` fraction
/// digits, for a quantity given as a family of enclosures indexed by scale.
pub fn render<F>(digits: u32, enclose: F) -> String
where
    F: Fn(u32) -> Enclosure,
{
    let mut guard = GUARD_DIGITS;
    for _ in 0..MAX_REFINEMENTS {
        let e = enclose(digits + guard);
        let lo = round_half_away(&e.lo, guard);
        let hi = round_half_away(&e.hi, guard);
        if lo == hi {
            return format_fixed(&lo, digits, lo.sign() == Sign::Minus);
        }
        guard *= 2;
    }
    // Unreachable for the irrational-or-exact quantities rendered here.
    let e = enclose(digits + guard);
    let lo = round_half_away(&e.lo, guard);
    format_fixed(&lo, digits, lo.sign() == Sign::Minus)
}

/// Rounds up to `digits` fraction digits: the least multiple of
/// `10^-digits` that is provably `>= x`.
pub fn round_up<F>(digits: u32, enclose: F) -> ExactRational
where
    F: Fn(u32) -> Enclosure,
{
    let e = enclose(digits + GUARD_DIGITS);
    let hi = e.hi.div_ceil(&pow10(GUARD_DIGITS));
    ExactRational::new(hi, pow10(digits)).expect("nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        assert_eq!(render(10, Enclosure::pi), "3.1415926536");
        let e = Enclosure::pi(40);
        assert!(e.hi - e.lo <= BigInt::from(2));
        let pi50 = "3.14159265358979323846264338327950288419716939937511";
        assert_eq!(render(50, Enclosure::pi), pi50);
    }

    #[test]
    fn sqrt_enclosure() {
        let two = ExactRational::integer(2);
        assert_eq!(render(6, |k| Enclosure::sqrt(&two, k)), "1.414214");
        let nine = ExactRational::integer(9);
        let e = Enclosure::sqrt(&nine, 5);
        assert_eq!(e.lo, e.hi);
        assert_eq!(render(3, |k| Enclosure::inv_sqrt(&nine, k)), "0.333");
    }

    #[test]
    fn rendering_handles_exact_ties_and_signs() {
        let q = ExactRational::frac(-1, 4);
        assert_eq!(render(1, |k| Enclosure::exact(&q, k)), "-0.3");
        assert_eq!(render(3, |k| Enclosure::exact(&q, k)), "-0.250");
        let q = ExactRational::frac(-1, 6);
        assert_eq!(render(3, |k| Enclosure::exact(&q, k)), "-0.167");
    }

    #[test]
    fn round_up_is_an_upper_bound() {
        let two = ExactRational::integer(2);
        let up = round_up(12, |k| Enclosure::sqrt(&two, k));
        assert_eq!(up.to_decimal(12), "1.414213562374");
        assert!(&up * &up > two);
        let less = &up - &ExactRational::new(1, 1_000_000_000_000i64).unwrap();
        assert!(&less * &less < two);
    }
}
