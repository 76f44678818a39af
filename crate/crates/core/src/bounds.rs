//! Closed-form lower bounds on `d(m, n)`, the least degree of a plane curve
//! with multiplicity at least `m` at each of `n` general points.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::{ceil_sqrt, isqrt, ExactRational};
use crate::decimal::{self, Enclosure};
use crate::error::{Error, Result};
use crate::unloading::roe_r_block;

/// Exact values `c_n` with `d(m, n) = ceil(c_n m)` for `n <= 9`.
const SMALL_N_CONSTANTS: [(i64, i64); 9] = [
    (1, 1),
    (1, 1),
    (3, 2),
    (2, 1),
    (2, 1),
    (12, 5),
    (21, 8),
    (48, 17),
    (3, 1),
];

fn positive(op: &'static str, name: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::domain(op, format!("{name} must be positive")));
    }
    Ok(())
}

fn to_u64(v: BigInt) -> u64 {
    v.to_u64().expect("degree bound fits in u64")
}

/// `lambda_n = n s / ceil(s sqrt(n))` with `s = floor(sqrt(n))`.
///
/// The denominator is `ceil_sqrt(n s^2)`, which equals `ceil(s sqrt(n))`
/// exactly.
pub fn lambda(n: u64) -> Result<ExactRational> {
    positive("lambda", "n", n)?;
    let s = isqrt(n);
    ExactRational::new(n * s, ceil_sqrt(n * s * s))
}

/// `ceil(m lambda_n)`.
pub fn lambda_bound(m: u64, n: u64) -> Result<u64> {
    positive("lambda_bound", "m", m)?;
    Ok(to_u64((ExactRational::from(m) * lambda(n)?).ceil()))
}

/// `m floor(sqrt(n))`.
pub fn easy_bound_floor(m: u64, n: u64) -> Result<u64> {
    positive("easy_bound_floor", "m", m)?;
    positive("easy_bound_floor", "n", n)?;
    Ok(m * isqrt(n))
}

/// A rational lower bound together with its integer ceiling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioBound {
    pub value: ExactRational,
    pub bound: u64,
}

/// `m n / ceil(sqrt(n))`.
pub fn easy_bound_ratio(m: u64, n: u64) -> Result<RatioBound> {
    positive("easy_bound_ratio", "m", m)?;
    positive("easy_bound_ratio", "n", n)?;
    let value = ExactRational::new(m * n, ceil_sqrt(n))?;
    let bound = to_u64(value.ceil());
    Ok(RatioBound { value, bound })
}

/// `c_n` for `1 <= n <= 9`.
pub fn small_n_constant(n: u64) -> Result<ExactRational> {
    match n {
        1..=9 => {
            let (p, q) = SMALL_N_CONSTANTS[n as usize - 1];
            Ok(ExactRational::frac(p, q))
        }
        _ => Err(Error::SmallNOutOfRange { n }),
    }
}

/// `d(m, n) = ceil(c_n m)` for `n <= 9`.
pub fn small_n_exact(m: u64, n: u64) -> Result<u64> {
    positive("small_n_exact", "m", m)?;
    let c = small_n_constant(n)?;
    Ok(to_u64((ExactRational::from(m) * c).ceil()))
}

/// A curve degree `d` and point count `r` with `(r/d)^2 >= n`, `r <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DrPair {
    pub d: u64,
    pub r: u64,
}

impl DrPair {
    pub fn validate(&self, n: u64) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidPair {
            n,
            d: self.d,
            r: self.r,
            reason: reason.to_string(),
        };
        if self.d == 0 || self.r == 0 || n == 0 {
            return Err(invalid("d, r and n must be positive"));
        }
        if (self.r as u128).pow(2) < n as u128 * (self.d as u128).pow(2) {
            return Err(invalid("r^2 < n d^2"));
        }
        if self.r > n {
            return Err(invalid("r > n"));
        }
        Ok(())
    }

    /// The pair used for lambda_n: `d = floor(sqrt(n))`, `r = ceil(d sqrt(n))`.
    pub fn for_lambda(n: u64) -> Self {
        let d = isqrt(n);
        DrPair {
            d,
            r: ceil_sqrt(n * d * d),
        }
    }
}

/// `ceil(m n d / r)` for a valid pair.
pub fn general_bound(m: u64, n: u64, pair: DrPair) -> Result<u64> {
    positive("general_bound", "m", m)?;
    pair.validate(n)?;
    Ok(to_u64(ExactRational::new(m * n * pair.d, pair.r)?.ceil()))
}

/// The pair maximizing `n d / r` over `1 <= d <= floor(sqrt(n))` with
/// `r = ceil(d sqrt(n))`; ties go to the smallest `d`.
pub fn optimize_dr(n: u64) -> Result<(DrPair, ExactRational)> {
    positive("optimize_dr", "n", n)?;
    let mut best: Option<(DrPair, ExactRational)> = None;
    for d in 1..=isqrt(n) {
        let pair = DrPair {
            d,
            r: ceil_sqrt(n * d * d),
        };
        if pair.r > n {
            continue;
        }
        let value = ExactRational::new(n * d, pair.r)?;
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((pair, value));
        }
    }
    Ok(best.expect("d = 1 is always admissible"))
}

/// `d > m sqrt(n)`, decided as `d^2 > m^2 n`.
pub fn nagata_holds(d: u64, m: u64, n: u64) -> bool {
    (d as u128).pow(2) > (m as u128).pow(2) * n as u128
}

fn closed_form_applies(m: u64, s: u64) -> bool {
    if m == 0 || s == 0 {
        return false;
    }
    let (m, s) = (m as u128, s as u128);
    match (s % 2 == 0, m % 2 == 0) {
        (true, true) => m < 4 * s + 2,
        (true, false) => m < 2 * s,
        (false, true) => m * (3 * s + 1) < 4 * s * s + 2 * s + 2,
        (false, false) => m * (3 * s + 1) < 2 * s * s + s + 1,
    }
}

/// `ceil(m lambda_n)` for `n = s^2 + s` in closed form: `ms + m/2` for even
/// `m` and `ms + (m+1)/2` for odd `m`, inside the ranges where that
/// is known to hold.
pub fn lambda_closed_form(m: u64, s: u64) -> Result<u64> {
    if !closed_form_applies(m, s) {
        return Err(Error::ClosedFormOutOfRange { m, s });
    }
    Ok(m * s + m.div_ceil(2))
}

/// Whether `(s, m)` lies in a range where `ceil(m lambda_n) > m sqrt(n)`
/// for `n = s^2 + s` is guaranteed: `s` even with `m < 2s`, or `s` odd with
/// `m < 2s/3`. Inside the range the Nagata inequality is re-checked and a
/// failure is reported as an error.
pub fn nagata_range_check(s: u64, m: u64) -> Result<bool> {
    if s < 3 {
        return Err(Error::domain("nagata_range_check", "s must be at least 3"));
    }
    positive("nagata_range_check", "m", m)?;
    let in_range = if s.is_multiple_of(2) {
        m < 2 * s
    } else {
        3 * m < 2 * s
    };
    if in_range {
        let n = s * s + s;
        let bound = lambda_bound(m, n)?;
        if !nagata_holds(bound, m, n) {
            return Err(Error::domain(
                "nagata_range_check",
                format!("ceil(m lambda_n) = {bound} <= m sqrt(n) at s = {s}, m = {m}"),
            ));
        }
    }
    Ok(in_range)
}

/// `m sqrt(n) - 1/(2 sqrt(n - 1))`, correctly rounded to `digits`.
pub fn xu_threshold(m: u64, n: u64, digits: u32) -> Result<String> {
    if n < 2 {
        return Err(Error::domain("xu_threshold", "n must be at least 2"));
    }
    let main = ExactRational::from(m) * ExactRational::from(m) * ExactRational::from(n);
    let corr = ExactRational::from(4 * (n - 1));
    Ok(decimal::render(digits, |k| {
        Enclosure::sqrt(&main, k).sub(&Enclosure::inv_sqrt(&corr, k))
    }))
}

/// Which bound produced the best value in a [`BoundReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    ExactSmallN,
    Lambda,
    GeneralBest,
    RoeUnloading,
    EasyRatio,
    EasyFloor,
}

impl BoundSource {
    pub fn label(&self) -> &'static str {
        match self {
            BoundSource::ExactSmallN => "exact small-n",
            BoundSource::Lambda => "lambda",
            BoundSource::GeneralBest => "general (d, r)",
            BoundSource::RoeUnloading => "unloading R(m,n)",
            BoundSource::EasyRatio => "easy mn/ceil(sqrt n)",
            BoundSource::EasyFloor => "easy m floor(sqrt n)",
        }
    }
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralBest {
    pub d: u64,
    pub r: u64,
    pub value: ExactRational,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub m: u64,
    pub n: u64,
    pub easy_floor: u64,
    pub easy_ratio: RatioBound,
    pub lambda_value: ExactRational,
    pub lambda_bound: u64,
    pub general_best: GeneralBest,
    /// `R(m, n)`; defined for `n >= 3` only.
    pub roe_r: Option<u64>,
    pub exact_small_n: Option<u64>,
    /// Informational: a bound for reduced irreducible curves, not for d(m, n).
    pub xu_threshold: Option<String>,
    pub nagata_holds_at_best: bool,
    pub best: u64,
    pub best_source: BoundSource,
}

/// Digits used for the Xu threshold in reports.
pub const REPORT_DIGITS: u32 = 6;

impl BoundReport {
    /// Every integer bound in the report with its source, in provenance
    /// priority order.
    pub fn integer_bounds(&self) -> Vec<(BoundSource, u64)> {
        let mut out = Vec::with_capacity(6);
        if let Some(v) = self.exact_small_n {
            out.push((BoundSource::ExactSmallN, v));
        }
        out.push((BoundSource::Lambda, self.lambda_bound));
        out.push((BoundSource::GeneralBest, self.general_best.bound));
        if let Some(v) = self.roe_r {
            out.push((BoundSource::RoeUnloading, v));
        }
        out.push((BoundSource::EasyRatio, self.easy_ratio.bound));
        out.push((BoundSource::EasyFloor, self.easy_floor));
        out
    }
}

/// All bounds for one `(m, n)`; the best is the maximum, with ties resolved
/// in the order of [`BoundReport::integer_bounds`].
pub fn bound_report(m: u64, n: u64) -> Result<BoundReport> {
    positive("bound_report", "m", m)?;
    positive("bound_report", "n", n)?;
    let lambda_value = lambda(n)?;
    let lambda_bound = to_u64((ExactRational::from(m) * &lambda_value).ceil());
    let (pair, value) = optimize_dr(n)?;
    let general_best = GeneralBest {
        d: pair.d,
        r: pair.r,
        bound: general_bound(m, n, pair)?,
        value,
    };
    let roe_r = if n >= 3 {
        Some(roe_r_block(m, n)?.value)
    } else {
        None
    };
    let exact_small_n = if n <= 9 {
        Some(small_n_exact(m, n)?)
    } else {
        None
    };
    let xu_threshold = if n >= 2 {
        Some(xu_threshold(m, n, REPORT_DIGITS)?)
    } else {
        None
    };
    let mut report = BoundReport {
        m,
        n,
        easy_floor: easy_bound_floor(m, n)?,
        easy_ratio: easy_bound_ratio(m, n)?,
        lambda_value,
        lambda_bound,
        general_best,
        roe_r,
        exact_small_n,
        xu_threshold,
        nagata_holds_at_best: false,
        best: 0,
        best_source: BoundSource::EasyFloor,
    };
    let (source, best) = report
        .integer_bounds()
        .into_iter()
        .fold(None::<(BoundSource, u64)>, |acc, (s, v)| match acc {
            Some((_, b)) if b >= v => acc,
            _ => Some((s, v)),
        })
        .expect("at least one bound");
    report.best = best;
    report.best_source = source;
    report.nagata_holds_at_best = nagata_holds(best, m, n);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sqrt_decompose;

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda(9).unwrap(), ExactRational::integer(3));
        assert_eq!(lambda(10).unwrap(), ExactRational::integer(3));
        assert_eq!(lambda(6).unwrap(), ExactRational::frac(12, 5));
        assert_eq!(lambda(12).unwrap(), ExactRational::frac(36, 11));
        assert!(lambda(0).is_err());
    }

    #[test]
    fn lambda_bound_examples() {
        assert_eq!(lambda_bound(1, 12).unwrap(), 4);
        assert_eq!(lambda_bound(2, 6).unwrap(), 5);
        assert_eq!(lambda_bound(5, 9).unwrap(), 15);
    }

    #[test]
    fn easy_bound_examples() {
        assert_eq!(easy_bound_floor(3, 10).unwrap(), 9);
        assert_eq!(easy_bound_floor(1, 1).unwrap(), 1);
        assert_eq!(easy_bound_floor(4, 15).unwrap(), 12);
        let r = easy_bound_ratio(2, 5).unwrap();
        assert_eq!((r.value, r.bound), (ExactRational::frac(10, 3), 4));
        let r = easy_bound_ratio(1, 9).unwrap();
        assert_eq!((r.value, r.bound), (ExactRational::integer(3), 3));
        let r = easy_bound_ratio(3, 8).unwrap();
        assert_eq!((r.value, r.bound), (ExactRational::integer(8), 8));
    }

    #[test]
    fn small_n_examples() {
        assert_eq!(small_n_exact(2, 7).unwrap(), 6);
        assert_eq!(small_n_exact(1, 3).unwrap(), 2);
        assert_eq!(small_n_exact(17, 8).unwrap(), 48);
        assert!(matches!(
            small_n_exact(1, 10),
            Err(Error::SmallNOutOfRange { n: 10 })
        ));
    }

    #[test]
    fn general_bound_examples() {
        assert_eq!(general_bound(1, 12, DrPair { d: 2, r: 7 }).unwrap(), 4);
        assert_eq!(general_bound(1, 9, DrPair { d: 3, r: 9 }).unwrap(), 3);
        assert_eq!(general_bound(2, 12, DrPair { d: 3, r: 11 }).unwrap(), 7);
        assert!(general_bound(1, 12, DrPair { d: 2, r: 6 }).is_err());
        assert!(general_bound(1, 12, DrPair { d: 4, r: 14 }).is_err());
    }

    #[test]
    fn optimize_dr_examples() {
        assert_eq!(
            optimize_dr(12).unwrap(),
            (DrPair { d: 2, r: 7 }, ExactRational::frac(24, 7))
        );
        // Every d in 1..=3 attains 3 at n = 9; the smallest wins.
        assert_eq!(
            optimize_dr(9).unwrap(),
            (DrPair { d: 1, r: 3 }, ExactRational::integer(3))
        );
        assert_eq!(
            optimize_dr(2).unwrap(),
            (DrPair { d: 1, r: 2 }, ExactRational::integer(1))
        );
    }

    #[test]
    fn optimize_dr_dominates_lambda() {
        for n in 1..=10_000 {
            let (pair, value) = optimize_dr(n).unwrap();
            pair.validate(n).unwrap();
            assert!(value >= lambda(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn lambda_pair_is_always_valid() {
        for n in 1..=200_000 {
            DrPair::for_lambda(n).validate(n).unwrap();
        }
    }

    #[test]
    fn nagata_examples() {
        assert!(nagata_holds(10, 3, 10));
        assert!(!nagata_holds(3, 1, 9));
        assert!(nagata_holds(4, 1, 12));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(lambda_closed_form(2, 2).unwrap(), 5);
        assert_eq!(lambda_closed_form(3, 2).unwrap(), 8);
        assert_eq!(lambda_closed_form(1, 5).unwrap(), 6);
        assert_eq!(lambda_bound(1, 30).unwrap(), 6);
        assert!(lambda_closed_form(10, 2).is_err());
        assert!(lambda_closed_form(5, 2).is_err());
        assert!(lambda_closed_form(3, 1).is_err());
        assert!(lambda_closed_form(0, 4).is_err());
    }

    #[test]
    fn closed_form_matches_ceiling_on_domain() {
        for s in 1..=40u64 {
            for m in 1..=4 * s + 2 {
                if let Ok(v) = lambda_closed_form(m, s) {
                    assert_eq!(v, lambda_bound(m, s * s + s).unwrap(), "m = {m}, s = {s}");
                }
            }
        }
    }

    #[test]
    fn nagata_range_examples() {
        assert!(nagata_range_check(4, 7).unwrap());
        assert!(nagata_range_check(3, 1).unwrap());
        assert!(!nagata_range_check(3, 2).unwrap());
        assert!(nagata_range_check(2, 1).is_err());
    }

    #[test]
    fn xu_examples() {
        assert_eq!(xu_threshold(1, 10, 3).unwrap(), "2.996");
        assert_eq!(xu_threshold(0, 10, 3).unwrap(), "-0.167");
        assert_eq!(xu_threshold(2, 5, 3).unwrap(), "4.222");
        assert_eq!(xu_threshold(0, 5, 2).unwrap(), "-0.25");
        assert!(xu_threshold(1, 1, 3).is_err());
    }

    #[test]
    fn comparison_with_easy_bounds() {
        for n in 1..=20_000u64 {
            let l = lambda(n).unwrap();
            let dec = sqrt_decompose(n);
            let floor = ExactRational::from(dec.s);
            assert!(l >= floor);
            assert_eq!(l == floor, dec.t <= 1, "n = {n}");
            let ratio = ExactRational::new(n, ceil_sqrt(n)).unwrap();
            assert!(l >= ratio);
            let eq = dec.t == 0 || dec.t + 1 == 2 * dec.s || dec.t == 2 * dec.s;
            assert_eq!(l == ratio, eq, "n = {n}");
            assert!(&l * &l <= n);
        }
    }

    #[test]
    fn report_examples() {
        let r = bound_report(1, 12).unwrap();
        assert_eq!(r.best, 4);
        assert_eq!(r.best_source, BoundSource::Lambda);
        assert_eq!((r.general_best.d, r.general_best.r), (2, 7));
        assert_eq!(r.general_best.value, ExactRational::frac(24, 7));
        assert_eq!(r.exact_small_n, None);

        let r = bound_report(2, 7).unwrap();
        assert_eq!(r.best, 6);
        assert_eq!(r.best_source, BoundSource::ExactSmallN);

        let r = bound_report(1, 1).unwrap();
        assert_eq!(r.best, 1);
        assert_eq!(r.roe_r, None);
        assert_eq!(r.xu_threshold, None);
    }

    #[test]
    fn report_invariants() {
        for n in 1..=40 {
            for m in 1..=12 {
                let r = bound_report(m, n).unwrap();
                let bounds = r.integer_bounds();
                assert_eq!(r.best, bounds.iter().map(|b| b.1).max().unwrap());
                let winner = bounds.iter().find(|b| b.1 == r.best).unwrap().0;
                assert_eq!(r.best_source, winner);
                assert_eq!(
                    r.lambda_bound,
                    to_u64((ExactRational::from(m) * &r.lambda_value).ceil())
                );
                if let Some(exact) = r.exact_small_n {
                    assert!(bounds.iter().all(|b| b.1 <= exact), "m = {m}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn small_n_dominates_every_bound() {
        for n in 1..=9 {
            for m in 1..=50 {
                let r = bound_report(m, n).unwrap();
                let exact = r.exact_small_n.unwrap();
                assert!(
                    r.integer_bounds().iter().all(|b| b.1 <= exact),
                    "m = {m}, n = {n}"
                );
            }
        }
    }
}
