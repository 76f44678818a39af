//! Acceptance criteria, each checked against oracles written here rather
//! than the library's own verify suites. Runs without the libtest harness
//! so every PASS/FAIL line is printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fatpoint::arith::{ceil_rational, ExactRational};
use fatpoint::averaged::{check_analytic_bound, roe_r, roe_r_product};
use fatpoint::bounds::{
    lambda, lambda_bound, lambda_closed_form, nagata_range_check, small_n_exact,
};
use fatpoint::lattice::{effective_decomposition, Generator, NefCertificate};
use fatpoint::unloading::{roe_r_block, roe_r_naive};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn ceil_sqrt(n: u128) -> u128 {
    let s = isqrt(n);
    if s * s == n {
        s
    } else {
        s + 1
    }
}

/// lambda_n as (numerator, denominator), not necessarily reduced.
fn lambda_parts(n: u128) -> (u128, u128) {
    let s = isqrt(n);
    (n * s, ceil_sqrt(n * s * s))
}

fn big(q: &ExactRational) -> (BigInt, BigInt) {
    (q.numer().clone(), q.denom().clone())
}

fn small_n_exactness() -> Outcome {
    const C: [(u64, u64); 9] = [
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
    let mut cases = 0;
    for (idx, &(p, q)) in C.iter().enumerate() {
        let n = idx as u64 + 1;
        for m in 1..=50 {
            let want = (p * m).div_ceil(q);
            let got = small_n_exact(m, n).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!(
                    "n={n} m={m}: small_n_exact {got}, ceil(c_n m) = {want}"
                ));
            }
            let lb = lambda_bound(m, n).map_err(|e| e.to_string())?;
            if lb > got {
                return Err(format!("n={n} m={m}: lambda_bound {lb} > exact {got}"));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

fn observation() -> Outcome {
    let mut worst = 0i64;
    for m in 2..=100u64 {
        let r = roe_r_block(m, m * m).map_err(|e| e.to_string())?.value as i64;
        // |R - (m^2 + m/10)| <= 1, scaled by 10
        let gap = 10 * r - (10 * (m * m) as i64 + m as i64);
        if gap.abs() > 10 {
            return Err(format!("m={m}: R = {r}, 10R - 10(m^2 + m/10) = {gap}"));
        }
        worst = worst.max(gap.abs());
    }
    Ok(format!("99 cases, max |R - (m^2+m/10)| = {}/10", worst))
}

fn engine_equivalence() -> Outcome {
    let mut cases = 0;
    let mut check = |m: u64, n: u64| -> Result<(), String> {
        let a = roe_r_naive(m, n, false).map_err(|e| e.to_string())?.value;
        let b = roe_r_block(m, n).map_err(|e| e.to_string())?.value;
        if a != b {
            return Err(format!("m={m} n={n}: naive {a}, block {b}"));
        }
        cases += 1;
        Ok(())
    };
    for n in 3..=25 {
        for m in 1..=15 {
            check(m, n)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    for _ in 0..200 {
        let n = rng.gen_range(3..=200);
        let m = rng.gen_range(1..=50);
        check(m, n)?;
    }
    Ok(format!("{cases} pairs, 0 disagreements"))
}

fn easy_equality_conditions() -> Outcome {
    for n in 1..=100_000u128 {
        let s = isqrt(n);
        let t = n - s * s;
        let c = ceil_sqrt(n);
        let (p, q) = lambda_parts(n);
        let lib = lambda(n as u64).map_err(|e| e.to_string())?;
        if BigInt::from(p) * lib.denom() != BigInt::from(q) * lib.numer() {
            return Err(format!("n={n}: lambda = {lib}, oracle {p}/{q}"));
        }
        // p/q vs s
        if p < s * q {
            return Err(format!("n={n}: lambda < floor(sqrt n)"));
        }
        if (p == s * q) != (t <= 1) {
            return Err(format!("n={n}: equality with floor(sqrt n) wrong (t={t})"));
        }
        // p/q vs n/c
        if p * c < n * q {
            return Err(format!("n={n}: lambda < n/ceil(sqrt n)"));
        }
        let eq = t == 0 || t == 2 * s - 1 || t == 2 * s;
        if (p * c == n * q) != eq {
            return Err(format!(
                "n={n}: equality with n/ceil(sqrt n) wrong (t={t}, s={s})"
            ));
        }
    }
    Ok("100000 cases".into())
}

/// r(n) = (n-1) prod (n-1+i^2-i)/(n-1+i^2), unreduced.
fn r_parts(n: u64) -> (BigInt, BigInt) {
    let k = n - 1;
    let mut num = BigInt::from(k);
    let mut den = BigInt::from(1u32);
    for i in 2..n {
        num *= k + i * i - i;
        den *= k + i * i;
    }
    (num, den)
}

fn lambda_above_r() -> Outcome {
    for n in 3..=300u64 {
        let rec = roe_r(n).map_err(|e| e.to_string())?;
        let prod = roe_r_product(n).map_err(|e| e.to_string())?;
        if rec != prod {
            return Err(format!("n={n}: recurrence {rec} != product {prod}"));
        }
        let (num, den) = r_parts(n);
        let (rn, rd) = big(&rec);
        if &rn * &den != &rd * &num {
            return Err(format!(
                "n={n}: r(n) = {rec} disagrees with the product oracle"
            ));
        }
        let (lp, lq) = lambda_parts(n as u128);
        if BigInt::from(lp) * &den <= BigInt::from(lq) * &num {
            return Err(format!("n={n}: lambda_n - r(n) <= 0"));
        }
    }
    Ok("298 cases".into())
}

fn unloading_upper_bound() -> Outcome {
    let mut cases = 0;
    for n in 3..=60u64 {
        let (num, den) = r_parts(n);
        for m in 1..=20u64 {
            let big_r = roe_r_block(m, n).map_err(|e| e.to_string())?.value;
            // R - 2(n-1) <= m num / den
            let lhs = (BigInt::from(big_r) - BigInt::from(2 * (n - 1))) * &den;
            if lhs > BigInt::from(m) * &num {
                return Err(format!("m={m} n={n}: R = {big_r} exceeds m r(n) + 2(n-1)"));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

fn analytic_bound() -> Outcome {
    const SCALE: u128 = 1_000_000_000_000;
    // 15 correct digits of pi, truncated: a lower bound
    const PI_LO_E14: u128 = 314_159_265_358_979;
    let pi8_lo = PI_LO_E14 * SCALE / (8 * 100_000_000_000_000);
    for n in 3..=500u64 {
        let k = (n - 1) as u128;
        let sqrt_hi = ceil_sqrt(k * SCALE * SCALE);
        let inv_hi = ceil_sqrt((SCALE * SCALE).div_ceil(k));
        // at most 3 units in the 12th digit above the exact right side
        let upper = sqrt_hi + inv_hi - pi8_lo;
        let (num, den) = r_parts(n);
        if num * BigInt::from(SCALE) > den * BigInt::from(upper) {
            return Err(format!("n={n}: r(n) above the 12-digit upper bound"));
        }
        let lib = check_analytic_bound(n, 12).map_err(|e| e.to_string())?;
        if !lib.holds || lib.digits != 12 {
            return Err(format!("n={n}: library check {lib:?}"));
        }
    }
    Ok("498 cases, 0 violations".into())
}

fn in_closed_form_range(m: u64, s: u64) -> bool {
    let (m, s) = (m as u128, s as u128);
    if s % 2 == 0 {
        if m % 2 == 0 {
            m < 4 * s + 2
        } else {
            m < 2 * s
        }
    } else if m % 2 == 0 {
        m * (3 * s + 1) < 4 * s * s + 2 * s + 2
    } else {
        m * (3 * s + 1) < 2 * s * s + s + 1
    }
}

fn closed_forms() -> Outcome {
    let mut cases = 0;
    for s in 1..=40u64 {
        let n = s * s + s;
        let (p, q) = lambda_parts(n as u128);
        for m in 1..=4 * s + 4 {
            let got = lambda_closed_form(m, s);
            if !in_closed_form_range(m, s) {
                if got.is_ok() {
                    return Err(format!("s={s} m={m}: accepted outside the range"));
                }
                continue;
            }
            let got = got.map_err(|e| format!("s={s} m={m}: {e}"))?;
            let q_ml = ExactRational::new(BigInt::from(m as u128 * p), BigInt::from(q))
                .map_err(|e| e.to_string())?;
            let want = ceil_rational(&q_ml);
            if BigInt::from(got) != want {
                return Err(format!(
                    "s={s} m={m}: closed form {got}, ceil(m lambda_n) = {want}"
                ));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

fn nagata_theorem() -> Outcome {
    let mut cases = 0;
    for s in 3..=30u64 {
        let n = s * s + s;
        for m in 1..=4 * s {
            if nagata_range_check(s, m).map_err(|e| e.to_string())? {
                let b = lambda_bound(m, n).map_err(|e| e.to_string())? as u128;
                if b * b <= (m as u128).pow(2) * n as u128 {
                    return Err(format!("s={s} m={m}: {b}^2 <= m^2 n"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn coefficient_class(g: Generator, d: i64, r: usize, n: usize) -> Vec<i64> {
    let mut v = vec![0i64; n + 1];
    match g {
        Generator::Curve => {
            v[0] = d;
            for x in &mut v[1..=r] {
                *x = -1;
            }
        }
        Generator::Difference(j) => {
            v[j] = 1;
            v[j + 1] = -1;
        }
        Generator::Exceptional(j) => v[j] = 1,
    }
    v
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<i64>()
}

fn lattice_certificates() -> Outcome {
    for n in 2..=400u64 {
        let d = isqrt(n as u128) as u64;
        let r = ceil_sqrt((n * d * d) as u128) as u64;
        if r * r < n * d * d || r > n {
            return Err(format!("n={n}: preconditions fail for d={d}, r={r}"));
        }
        let np = n as usize;
        let mut target = vec![-((d * d) as i64); np + 1];
        target[0] = (r * d) as i64;

        let cert = effective_decomposition(n, d, r).map_err(|e| e.to_string())?;
        let mut sum = vec![0i64; np + 1];
        for (g, w) in cert.terms() {
            if w < 0 {
                return Err(format!("n={n}: negative weight {w} on {g}"));
            }
            for (acc, c) in sum
                .iter_mut()
                .zip(coefficient_class(g, d as i64, r as usize, np))
            {
                *acc += w * c;
            }
        }
        if sum != target {
            return Err(format!("n={n}: decomposition sums to {sum:?}"));
        }
        let curve = coefficient_class(Generator::Curve, d as i64, r as usize, np);
        if dot(&target, &curve) != 0 {
            return Err(format!("n={n}: D.C != 0"));
        }
        for i in 1..np {
            let diff = coefficient_class(Generator::Difference(i), 0, 0, np);
            if dot(&target, &diff) != 0 {
                return Err(format!("n={n}: D.(e_{i}-e_{}) != 0", i + 1));
            }
        }
        if dot(
            &target,
            &coefficient_class(Generator::Exceptional(np), 0, 0, np),
        ) < 0
        {
            return Err(format!("n={n}: D.e_n < 0"));
        }
        let nef: NefCertificate =
            fatpoint::lattice::nef_certificate(n, d, r).map_err(|e| e.to_string())?;
        for m in [1u64, 2, 7] {
            let want = lambda_bound(m, n).map_err(|e| e.to_string())?;
            if nef.bound.implied_bound(m) != want {
                return Err(format!(
                    "n={n} m={m}: certificate bound differs from {want}"
                ));
            }
        }
    }
    Ok("399 certificates".into())
}

fn divergence_proxy() -> Outcome {
    let mut summary = Vec::new();
    for n in [10u64, 20, 50] {
        let (p, q) = lambda_parts(n as u128);
        let mut prev: Option<(i128, i128)> = None;
        for m in [10u64, 100, 1000] {
            let big_r = roe_r_block(m, n).map_err(|e| e.to_string())?.value as i128;
            // gap = (m p - R q) / q; q is fixed for this n
            let gap = m as i128 * p as i128 - big_r * q as i128;
            if let Some((pm, pg)) = prev {
                if gap <= pg {
                    return Err(format!("n={n}: gap fell from m={pm} to m={m}"));
                }
            }
            prev = Some((m as i128, gap));
            summary.push(format!("{:.3}", gap as f64 / q as f64));
        }
    }
    Ok(format!("gaps [{}]", summary.join(", ")))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "small-n exactness",
            limit: Some(Duration::from_secs(1)),
            run: small_n_exactness,
        },
        Criterion {
            id: 2,
            name: "R(m,m^2) observation",
            limit: Some(Duration::from_secs(60)),
            run: observation,
        },
        Criterion {
            id: 3,
            name: "engine equivalence",
            limit: None,
            run: engine_equivalence,
        },
        Criterion {
            id: 4,
            name: "lambda_n equality conditions",
            limit: Some(Duration::from_secs(60)),
            run: easy_equality_conditions,
        },
        Criterion {
            id: 5,
            name: "lambda_n > r(n)",
            limit: None,
            run: lambda_above_r,
        },
        Criterion {
            id: 6,
            name: "R(m,n) <= m r(n) + 2(n-1)",
            limit: None,
            run: unloading_upper_bound,
        },
        Criterion {
            id: 7,
            name: "analytic bound on r(n)",
            limit: None,
            run: analytic_bound,
        },
        Criterion {
            id: 8,
            name: "closed forms for ceil(m lambda_n)",
            limit: None,
            run: closed_forms,
        },
        Criterion {
            id: 9,
            name: "Nagata for n = s^2+s",
            limit: None,
            run: nagata_theorem,
        },
        Criterion {
            id: 10,
            name: "lattice certificates",
            limit: None,
            run: lattice_certificates,
        },
        Criterion {
            id: 11,
            name: "divergence proxy",
            limit: None,
            run: divergence_proxy,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut result = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, c.limit) {
            if elapsed > limit {
                result = Err(format!("took {elapsed:?}, limit {limit:?}"));
            }
        }
        match &result {
            Ok(detail) => println!(
                "PASS [{:>2}] {:<36} {:>9.3}s  {detail}",
                c.id,
                c.name,
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failures += 1;
                println!(
                    "FAIL [{:>2}] {:<36} {:>9.3}s  {why}",
                    c.id,
                    c.name,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
