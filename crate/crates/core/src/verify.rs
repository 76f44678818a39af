//! Invariant suites driven by `fatpoint verify`.
//!
//! Each check walks its range and stops at the first counterexample, which
//! is reported verbatim. `Full` uses the ranges the library is validated
//! against; `Fast` uses smaller ranges for a quick smoke run.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{ceil_sqrt, sqrt_decompose, ExactRational};
use crate::averaged::{check_analytic_bound, roe_r, roe_r_product};
use crate::bounds::{
    bound_report, lambda, lambda_bound, lambda_closed_form, nagata_holds, nagata_range_check,
    small_n_constant, small_n_exact,
};
use crate::error::Error;
use crate::lattice::lambda_certificate;
use crate::unloading::{roe_r_block, roe_r_checked, roe_r_naive};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fast,
    Full,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            other => Err(Error::Usage(format!(
                "unknown suite '{other}' (expected fast or full)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Fast => "fast",
            Suite::Full => "full",
        })
    }
}

#[derive(Debug, Clone)]
struct Scale {
    small_n_m: u64,
    observation_m: u64,
    engine_n: u64,
    engine_m: u64,
    random_pairs: usize,
    random_n: u64,
    random_m: u64,
    comparison_n: u64,
    lambda_r_n: u64,
    upper_n: u64,
    upper_m: u64,
    analytic_n: u64,
    closed_form_s: u64,
    nagata_s: u64,
    lattice_n: u64,
    divergence_m: &'static [u64],
}

impl Scale {
    fn of(suite: Suite) -> Self {
        match suite {
            Suite::Full => Scale {
                small_n_m: 50,
                observation_m: 100,
                engine_n: 25,
                engine_m: 15,
                random_pairs: 200,
                random_n: 200,
                random_m: 50,
                comparison_n: 100_000,
                lambda_r_n: 300,
                upper_n: 60,
                upper_m: 20,
                analytic_n: 500,
                closed_form_s: 40,
                nagata_s: 30,
                lattice_n: 400,
                divergence_m: &[10, 100, 1000],
            },
            Suite::Fast => Scale {
                small_n_m: 20,
                observation_m: 40,
                engine_n: 15,
                engine_m: 8,
                random_pairs: 30,
                random_n: 80,
                random_m: 20,
                comparison_n: 10_000,
                lambda_r_n: 100,
                upper_n: 30,
                upper_m: 10,
                analytic_n: 100,
                closed_form_s: 20,
                nagata_s: 15,
                lattice_n: 100,
                divergence_m: &[10, 100, 1000],
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: u64,
    pub failure: Option<String>,
    #[serde(serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type CheckResult = (u64, Option<String>);
type Check = (&'static str, fn(&Scale) -> CheckResult);

macro_rules! ensure {
    ($cases:expr, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            return ($cases, Some(format!($($msg)+)));
        }
    };
}

macro_rules! attempt {
    ($cases:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return ($cases, Some(err.to_string())),
        }
    };
}

fn small_n(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in 1..=9 {
        let c = attempt!(cases, small_n_constant(n));
        for m in 1..=sc.small_n_m {
            let exact = attempt!(cases, small_n_exact(m, n));
            let expected = (ExactRational::from(m) * &c).ceil();
            ensure!(
                cases,
                expected == BigInt::from(exact),
                "n = {n}, m = {m}: {exact} != ceil(c_n m) = {expected}"
            );
            let lb = attempt!(cases, lambda_bound(m, n));
            ensure!(
                cases,
                lb <= exact,
                "n = {n}, m = {m}: lambda bound {lb} > exact {exact}"
            );
            let report = attempt!(cases, bound_report(m, n));
            if let Some((src, v)) = report.integer_bounds().into_iter().find(|b| b.1 > exact) {
                return (
                    cases,
                    Some(format!("n = {n}, m = {m}: {src} = {v} > exact {exact}")),
                );
            }
            cases += 1;
        }
    }
    (cases, None)
}

fn observation(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for m in 2..=sc.observation_m {
        let r = attempt!(cases, roe_r_block(m, m * m)).value;
        let target = ExactRational::new(10 * m * m + m, 10u64).expect("nonzero");
        let gap = ExactRational::from(r) - target;
        ensure!(
            cases,
            gap <= ExactRational::one() && gap >= ExactRational::from(-1i64),
            "m = {m}: R(m, m^2) = {r} differs from m^2 + m/10 by {gap}"
        );
        cases += 1;
    }
    (cases, None)
}

fn engines(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in 3..=sc.engine_n {
        for m in 1..=sc.engine_m {
            attempt!(cases, roe_r_checked(m, n));
            let run = attempt!(cases, roe_r_naive(m, n, true));
            ensure!(
                cases,
                run.clipped_steps == 0,
                "m = {m}, n = {n}: rectification clipped"
            );
            let trace = run.trace.expect("requested");
            ensure!(
                cases,
                trace.is_all_block(),
                "m = {m}, n = {n}: tail left block form"
            );
            cases += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..sc.random_pairs {
        let n = rng.gen_range(3..=sc.random_n);
        let m = rng.gen_range(1..=sc.random_m);
        attempt!(cases, roe_r_checked(m, n));
        cases += 1;
    }
    (cases, None)
}

fn easy_comparison(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in 1..=sc.comparison_n {
        let l = attempt!(cases, lambda(n));
        let dec = sqrt_decompose(n);
        let floor = ExactRational::from(dec.s);
        ensure!(cases, l >= floor, "n = {n}: lambda < floor(sqrt n)");
        ensure!(
            cases,
            (l == floor) == (dec.t <= 1),
            "n = {n}: equality with floor(sqrt n) is {} but t = {}",
            l == floor,
            dec.t
        );
        let ratio = ExactRational::new(n, ceil_sqrt(n)).expect("nonzero");
        ensure!(cases, l >= ratio, "n = {n}: lambda < n/ceil(sqrt n)");
        let eq = dec.t == 0 || dec.t + 1 == 2 * dec.s || dec.t == 2 * dec.s;
        ensure!(
            cases,
            (l == ratio) == eq,
            "n = {n}: equality with n/ceil(sqrt n) is {} but t = {}, s = {}",
            l == ratio,
            dec.t,
            dec.s
        );
        cases += 1;
    }
    (cases, None)
}

fn lambda_vs_r(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in 3..=sc.lambda_r_n {
        let rec = attempt!(cases, roe_r(n));
        let prod = attempt!(cases, roe_r_product(n));
        ensure!(
            cases,
            rec == prod,
            "n = {n}: recurrence {rec} != product {prod}"
        );
        let l = attempt!(cases, lambda(n));
        ensure!(
            cases,
            (&l - &rec).is_positive(),
            "n = {n}: lambda_n - r(n) = {}",
            &l - &rec
        );
        cases += 1;
    }
    (cases, None)
}

fn unloading_upper(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in 3..=sc.upper_n {
        let rn = attempt!(cases, roe_r(n));
        for m in 1..=sc.upper_m {
            let big_r = attempt!(cases, roe_r_block(m, n)).value;
            let rhs = ExactRational::from(m) * &rn + ExactRational::from(2 * (n - 1));
            ensure!(
                cases,
                rhs >= big_r,
                "m = {m}, n = {n}: R = {big_r} > m r(n) + 2(n-1) = {rhs}"
            );
            cases += 1;
        }
    }
    (cases, None)
}

fn analytic(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in 3..=sc.analytic_n {
        let check = attempt!(cases, check_analytic_bound(n, 12));
        ensure!(
            cases,
            check.holds,
            "n = {n}: r(n) exceeds the analytic bound {}",
            check.bound.to_decimal(12)
        );
        cases += 1;
    }
    (cases, None)
}

fn closed_forms(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for s in 1..=sc.closed_form_s {
        for m in 1..=4 * s + 2 {
            if let Ok(v) = lambda_closed_form(m, s) {
                let direct = (ExactRational::from(m) * attempt!(cases, lambda(s * s + s))).ceil();
                ensure!(
                    cases,
                    direct == BigInt::from(v),
                    "s = {s}, m = {m}: closed form {v} != {direct}"
                );
                cases += 1;
            }
        }
    }
    (cases, None)
}

fn nagata_ranges(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for s in 3..=sc.nagata_s {
        let n = s * s + s;
        for m in 1..2 * s {
            if attempt!(cases, nagata_range_check(s, m)) {
                let b = attempt!(cases, lambda_bound(m, n));
                ensure!(
                    cases,
                    nagata_holds(b, m, n),
                    "s = {s}, m = {m}: {b}^2 <= m^2 n"
                );
                cases += 1;
            }
        }
    }
    (cases, None)
}

fn lattice(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in 2..=sc.lattice_n {
        let cert = attempt!(cases, lambda_certificate(n));
        let (d, r) = (cert.d as u128, cert.r as u128);
        ensure!(
            cases,
            r * r >= n as u128 * d * d && r <= n as u128,
            "n = {n}: (d, r) = ({d}, {r}) fails the preconditions"
        );
        ensure!(cases, cert.all_hold(), "n = {n}: a pairing check failed");
        attempt!(cases, cert.decomposition.verify());
        for m in [1, 2, 7] {
            let lb = attempt!(cases, lambda_bound(m, n));
            ensure!(
                cases,
                cert.bound.implied_bound(m) == lb,
                "n = {n}, m = {m}: certificate bound differs from lambda bound {lb}"
            );
        }
        cases += 1;
    }
    (cases, None)
}

fn divergence(sc: &Scale) -> CheckResult {
    let mut cases = 0;
    for n in [10u64, 20, 50] {
        let l = attempt!(cases, lambda(n));
        let mut prev: Option<ExactRational> = None;
        for &m in sc.divergence_m {
            let r = attempt!(cases, roe_r_block(m, n)).value;
            let gap = ExactRational::from(m) * &l - ExactRational::from(r);
            if let Some(p) = &prev {
                ensure!(
                    cases,
                    gap > *p,
                    "n = {n}: m lambda - R fell from {p} to {gap} at m = {m}"
                );
            }
            prev = Some(gap);
            cases += 1;
        }
    }
    (cases, None)
}

const CHECKS: [Check; 11] = [
    ("small-n exact values", small_n),
    ("R(m,m^2) within 1 of m^2+m/10", observation),
    ("naive and block engines agree", engines),
    ("lambda vs easy bounds, equality cases", easy_comparison),
    ("lambda_n > r(n), recurrence = product", lambda_vs_r),
    ("R(m,n) <= m r(n) + 2(n-1)", unloading_upper),
    ("r(n) <= sqrt(n-1) - pi/8 + 1/sqrt(n-1)", analytic),
    ("closed forms for ceil(m lambda_n)", closed_forms),
    ("Nagata ranges for n = s^2+s", nagata_ranges),
    ("lattice nef certificates", lattice),
    ("m lambda_n - R(m,n) increasing in m", divergence),
];

pub fn run(suite: Suite) -> Vec<CheckOutcome> {
    let sc = Scale::of(suite);
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (cases, failure) = check(&sc);
            CheckOutcome {
                name,
                cases,
                failure,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        for outcome in run(Suite::Fast) {
            assert!(outcome.passed(), "{}: {:?}", outcome.name, outcome.failure);
            assert!(outcome.cases > 0, "{} checked nothing", outcome.name);
        }
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("fast".parse::<Suite>().unwrap(), Suite::Fast);
        assert_eq!("full".parse::<Suite>().unwrap(), Suite::Full);
        assert!(matches!("slow".parse::<Suite>(), Err(Error::Usage(_))));
    }
}
