//! The averaged (rational) unloading procedure and the constant `r(n)`.
//!
//! Replacing `v_i` by `(1, -i/(n-1), ..., -i/(n-1))` keeps the tail of the
//! uniform start constant, so each routine reduces to one exact step on the
//! pair `(r_i, s_i)` = (first entry, tail sum) per unit multiplicity.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::ExactRational;
use crate::bounds::lambda;
use crate::decimal::{self, Enclosure};
use crate::error::{Error, Result};

/// Largest `n` for which [`roe_r`] runs without an explicit override.
pub const DEFAULT_N_LIMIT: u64 = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AveragedState {
    pub i: u64,
    pub r: ExactRational,
    pub s: ExactRational,
}

impl AveragedState {
    /// `r_1 = 1`, `s_1 = n - 1`.
    pub fn initial(n: u64) -> Self {
        Self::uniform(1, n)
    }

    /// Start from `(m, ..., m)` rather than per unit multiplicity.
    pub fn uniform(m: u64, n: u64) -> Self {
        AveragedState {
            i: 1,
            r: ExactRational::from(m),
            s: ExactRational::from(m * (n - 1)),
        }
    }
}

/// `r_i = (i^2 / (n - 1 + i^2)) (r_{i-1} + s_{i-1}/i)`, `s_i = ((n-1)/i) r_i`.
pub fn averaged_step(state: &AveragedState, n: u64) -> Result<AveragedState> {
    let i = state.i + 1;
    if n < 3 || i > n - 1 {
        return Err(Error::domain(
            "averaged_step",
            format!("no routine {i} for n = {n}"),
        ));
    }
    let k = n - 1;
    let carried = &state.r + &state.s / ExactRational::from(i);
    let r = ExactRational::new(i * i, k + i * i)? * carried;
    let s = ExactRational::new(k, i)? * &r;
    Ok(AveragedState { i, r, s })
}

fn check_n(op: &'static str, n: u64, limit: u64) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(op, format!("n must be at least 3, got {n}")));
    }
    if n > limit {
        return Err(Error::domain(
            op,
            format!("n = {n} exceeds the limit {limit}; raise it explicitly"),
        ));
    }
    Ok(())
}

/// All states `i = 1, ..., n - 1`.
pub fn averaged_states(n: u64) -> Result<Vec<AveragedState>> {
    averaged_states_with_limit(n, DEFAULT_N_LIMIT)
}

pub fn averaged_states_with_limit(n: u64, limit: u64) -> Result<Vec<AveragedState>> {
    check_n("averaged_states", n, limit)?;
    let mut out = Vec::with_capacity(n as usize - 1);
    let mut state = AveragedState::initial(n);
    out.push(state.clone());
    for _ in 2..n {
        state = averaged_step(&state, n)?;
        out.push(state.clone());
    }
    Ok(out)
}

/// `r(n) = r_{n-1}(n)` by the recurrence.
pub fn roe_r(n: u64) -> Result<ExactRational> {
    roe_r_with_limit(n, DEFAULT_N_LIMIT)
}

/// Same recurrence as [`averaged_step`], carried as `r = a/D`, `s = b/D`
/// over one unreduced denominator; only the final value is reduced.
pub fn roe_r_with_limit(n: u64, limit: u64) -> Result<ExactRational> {
    check_n("roe_r", n, limit)?;
    let k = BigInt::from(n - 1);
    let (mut a, mut b, mut den) = (BigInt::one(), k.clone(), BigInt::one());
    for i in 2..n {
        // r + s/i = (a i + b) / (D i)
        let carried = &a * i + &b;
        a = &carried * i;
        b = &carried * &k;
        den *= &k + i * i;
    }
    ExactRational::new(a, den)
}

/// `r(n) = (n - 1) prod_{i=2}^{n-1} (1 - i/(n - 1 + i^2))`.
pub fn roe_r_product(n: u64) -> Result<ExactRational> {
    check_n("roe_r_product", n, DEFAULT_N_LIMIT)?;
    let k = n - 1;
    let (num, den) = (2..n).fold((BigInt::from(k), BigInt::one()), |(num, den), i| {
        (num * (k + i * i - i), den * (k + i * i))
    });
    ExactRational::new(num, den)
}

/// Enclosure of `sqrt(n-1) - pi/8 + 1/sqrt(n-1)` at decimal scale `scale`.
pub fn analytic_bound_enclosure(n: u64, scale: u32) -> Enclosure {
    let k = ExactRational::from(n - 1);
    Enclosure::sqrt(&k, scale)
        .sub(&Enclosure::pi(scale).div_int(8))
        .add(&Enclosure::inv_sqrt(&k, scale))
}

/// `sqrt(n-1) - pi/8 + 1/sqrt(n-1)`, correctly rounded to `digits`.
pub fn roe_upper_bound_analytic(n: u64, digits: u32) -> Result<String> {
    check_n("roe_upper_bound_analytic", n, u64::MAX)?;
    Ok(decimal::render(digits, |s| analytic_bound_enclosure(n, s)))
}

/// Outcome of checking `r(n) <= sqrt(n-1) - pi/8 + 1/sqrt(n-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyticCheck {
    pub n: u64,
    pub holds: bool,
    /// Precision at which the comparison was decided.
    pub digits: u32,
    /// The right side at `digits`, rounded up.
    pub bound: ExactRational,
}

/// Compares the exact `r(n)` against the right side rounded up to
/// `digits`. If the rounded-up value does not settle it, the precision is
/// raised until either the inequality is confirmed or a lower enclosure
/// proves a genuine violation.
pub fn check_analytic_bound(n: u64, digits: u32) -> Result<AnalyticCheck> {
    let rn = roe_r(n)?;
    let mut d = digits;
    loop {
        let bound = decimal::round_up(d, |s| analytic_bound_enclosure(n, s));
        if rn <= bound {
            return Ok(AnalyticCheck {
                n,
                holds: true,
                digits: d,
                bound,
            });
        }
        if rn > analytic_bound_enclosure(n, d + 8).upper() {
            return Ok(AnalyticCheck {
                n,
                holds: false,
                digits: d,
                bound,
            });
        }
        d *= 2;
    }
}

/// `lambda_n - r(n)`; an error if it is not strictly positive.
pub fn compare_lambda_r(n: u64) -> Result<ExactRational> {
    let diff = lambda(n)? - roe_r(n)?;
    if !diff.is_positive() {
        return Err(Error::LambdaNotAboveR {
            n,
            difference: diff.to_string(),
        });
    }
    Ok(diff)
}
