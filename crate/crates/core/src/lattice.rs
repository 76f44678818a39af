//! Divisor classes on the blow-up of the plane at `n` points, and the
//! certificates behind the `m n d / r` bound.
//!
//! Classes are integer vectors on the basis `e_0` (pullback of a line) and
//! `e_1, ..., e_n` (exceptional classes), with `e_0^2 = 1`, `e_i^2 = -1` and
//! all other products zero. The certificates here check lattice arithmetic
//! only: that `D` is a nonnegative combination of the listed classes and
//! meets each of them nonnegatively.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Serialize, Serializer};

use crate::arith::{ceil_sqrt, isqrt, ExactRational};
use crate::bounds::DrPair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DivisorClass {
    coefficients: Vec<i64>,
}

impl DivisorClass {
    pub fn new(coefficients: Vec<i64>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "a class needs the e_0 coefficient"
        );
        DivisorClass { coefficients }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n + 1])
    }

    /// Basis class `e_i` on the `n`-point blow-up.
    pub fn basis(i: usize, n: usize) -> Self {
        let mut c = Self::zero(n);
        c.coefficients[i] = 1;
        c
    }

    /// `e_j - e_{j+1}`.
    pub fn difference(j: usize, n: usize) -> Self {
        let mut c = Self::zero(n);
        c.coefficients[j] = 1;
        c.coefficients[j + 1] = -1;
        c
    }

    pub fn points(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> i64 {
        self.coefficients[0]
    }

    pub fn intersect(&self, other: &DivisorClass) -> Result<i64> {
        if self.points() != other.points() {
            return Err(Error::DimensionMismatch {
                left: self.points(),
                right: other.points(),
            });
        }
        let (a, b) = (&self.coefficients, &other.coefficients);
        let tail: i64 = a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum();
        Ok(a[0] * b[0] - tail)
    }

    pub fn self_intersection(&self) -> i64 {
        self.intersect(self).expect("same surface")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.coefficients[0])?;
        for (k, c) in self.coefficients[1..].iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, " {c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.points(), rhs.points(), "classes on different surfaces");
        DivisorClass::new(
            self.coefficients
                .iter()
                .zip(&rhs.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self + &(rhs * -1)
    }
}

impl Mul<i64> for &DivisorClass {
    type Output = DivisorClass;
    fn mul(self, k: i64) -> DivisorClass {
        DivisorClass::new(self.coefficients.iter().map(|a| a * k).collect())
    }
}

/// `d e_0 - (e_1 + ... + e_r)` on the `n`-point blow-up: the proper
/// transform of a degree-`d` curve through the first `r` points.
pub fn class_c(d: u64, r: u64, n: u64) -> Result<DivisorClass> {
    if r < 1 || r > n {
        return Err(Error::domain(
            "class_C",
            format!("need 1 <= r <= n, got r = {r}, n = {n}"),
        ));
    }
    let mut c = DivisorClass::zero(n as usize);
    c.coefficients[0] = d as i64;
    for x in &mut c.coefficients[1..=r as usize] {
        *x = -1;
    }
    Ok(c)
}

/// `r d e_0 - d^2 (e_1 + ... + e_n)`.
pub fn class_d(d: u64, r: u64, n: u64) -> Result<DivisorClass> {
    DrPair { d, r }.validate(n)?;
    Ok(class_d_unchecked(d, r, n))
}

fn class_d_unchecked(d: u64, r: u64, n: u64) -> DivisorClass {
    let mut c = DivisorClass::new(vec![-((d * d) as i64); n as usize + 1]);
    c.coefficients[0] = (r * d) as i64;
    c
}

/// A class appearing in a decomposition of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// The curve class `C`.
    Curve,
    /// `e_j - e_{j+1}`.
    Difference(usize),
    /// `e_j`.
    Exceptional(usize),
}

impl Generator {
    pub fn class(&self, d: u64, r: u64, n: u64) -> DivisorClass {
        match *self {
            Generator::Curve => class_c(d, r, n).expect("valid r"),
            Generator::Difference(j) => DivisorClass::difference(j, n as usize),
            Generator::Exceptional(j) => DivisorClass::basis(j, n as usize),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Curve => write!(f, "C"),
            Generator::Difference(j) => write!(f, "e_{}-e_{}", j, j + 1),
            Generator::Exceptional(j) => write!(f, "e_{j}"),
        }
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `D = r C + sum_j w_j (e_j - e_{j+1}) + beta e_n` with every weight
/// nonnegative.
///
/// For `r < n` the telescope weights are `(r - d^2) j` for `j = 1..=r`, the
/// tail weights on `e_{r+k} - e_{r+k+1}` are `M - k d^2` for
/// `k = 1..n-r-1` with `M = r^2 - r d^2`, and `beta = M - (n - r) d^2`.
/// For `r = n` the telescope stops at `j = n - 1` and `beta = n (r - d^2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionCertificate {
    pub n: u64,
    pub d: u64,
    pub r: u64,
    pub curve_weight: i64,
    pub telescope: Vec<i64>,
    pub tail: Vec<i64>,
    pub final_weight: i64,
}

impl DecompositionCertificate {
    /// Every `(generator, weight)` pair, zero weights included.
    pub fn terms(&self) -> Vec<(Generator, i64)> {
        let mut out = Vec::with_capacity(self.telescope.len() + self.tail.len() + 2);
        out.push((Generator::Curve, self.curve_weight));
        for (k, &w) in self.telescope.iter().enumerate() {
            out.push((Generator::Difference(k + 1), w));
        }
        let offset = self.telescope.len() + 1;
        for (k, &w) in self.tail.iter().enumerate() {
            out.push((Generator::Difference(offset + k), w));
        }
        out.push((Generator::Exceptional(self.n as usize), self.final_weight));
        out
    }

    /// Coefficientwise sum of the weighted generators.
    pub fn sum(&self) -> DivisorClass {
        self.terms()
            .iter()
            .fold(DivisorClass::zero(self.n as usize), |acc, (g, w)| {
                &acc + &(&g.class(self.d, self.r, self.n) * *w)
            })
    }

    pub fn verify(&self) -> Result<()> {
        if let Some((g, w)) = self.terms().into_iter().find(|(_, w)| *w < 0) {
            return Err(Error::CertificateCheck(format!(
                "weight of {g} is negative ({w})"
            )));
        }
        let target = class_d_unchecked(self.d, self.r, self.n);
        let sum = self.sum();
        if sum != target {
            return Err(Error::CertificateCheck(format!(
                "weighted sum {sum} differs from D = {target}"
            )));
        }
        Ok(())
    }
}

pub fn effective_decomposition(n: u64, d: u64, r: u64) -> Result<DecompositionCertificate> {
    let fail = |reason: String| Error::InvalidPair { n, d, r, reason };
    if d == 0 || r == 0 {
        return Err(fail("d and r must be positive".into()));
    }
    let (ni, di, ri) = (n as i64, d as i64, r as i64);
    let d2 = di * di;
    if d2 > ri {
        return Err(fail("d^2 > r".into()));
    }
    if r > n {
        return Err(fail("r > n".into()));
    }
    let excess = ri * ri - ri * d2;
    if excess < (ni - ri) * d2 {
        return Err(fail("r^2 - r d^2 < (n - r) d^2".into()));
    }
    let cert = if r < n {
        DecompositionCertificate {
            n,
            d,
            r,
            curve_weight: ri,
            telescope: (1..=ri).map(|j| (ri - d2) * j).collect(),
            tail: (1..ni - ri).map(|k| excess - k * d2).collect(),
            final_weight: excess - (ni - ri) * d2,
        }
    } else {
        DecompositionCertificate {
            n,
            d,
            r,
            curve_weight: ri,
            telescope: (1..ni).map(|j| (ri - d2) * j).collect(),
            tail: Vec::new(),
            final_weight: (ri - d2) * ni,
        }
    };
    cert.verify()?;
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingCheck {
    pub identity: String,
    pub value: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorPairing {
    pub generator: Generator,
    pub class: DivisorClass,
    pub weight: i64,
    pub pairing_with_d: i64,
}

/// `d(m, n) * degree_coefficient >= m * multiplicity_coefficient`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundStatement {
    pub degree_coefficient: i64,
    pub multiplicity_coefficient: i64,
    /// `multiplicity_coefficient / degree_coefficient`.
    pub ratio: ExactRational,
}

impl BoundStatement {
    fn new(degree_coefficient: i64, multiplicity_coefficient: i64) -> Self {
        BoundStatement {
            degree_coefficient,
            multiplicity_coefficient,
            ratio: ExactRational::new(multiplicity_coefficient, degree_coefficient)
                .expect("positive degree coefficient"),
        }
    }

    /// `ceil(m * ratio)`.
    pub fn implied_bound(&self, m: u64) -> u64 {
        let v = (ExactRational::from(m) * &self.ratio).ceil();
        u64::try_from(v).expect("nonnegative bound")
    }
}

impl fmt::Display for BoundStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} d(m,n) >= {} m, so d(m,n) >= ceil({} m)",
            self.degree_coefficient, self.multiplicity_coefficient, self.ratio
        )
    }
}

/// Everything needed to re-audit that `D` is nef and what it implies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NefCertificate {
    pub n: u64,
    pub d: u64,
    pub r: u64,
    pub divisor: DivisorClass,
    pub curve: DivisorClass,
    pub decomposition: DecompositionCertificate,
    pub generators: Vec<GeneratorPairing>,
    pub checks: Vec<PairingCheck>,
    pub bound: BoundStatement,
}

impl NefCertificate {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Builds and checks the nef certificate for `D = r d e_0 - d^2 sum e_i`:
/// `D.C = 0`, `D.(e_i - e_{i+1}) = 0`, `D.e_n >= 0`, and `D` meets every
/// generator of its own decomposition nonnegatively. Pairing `D` with
/// `d(m,n) e_0 - m sum e_i` then gives `d(m,n) r d >= d^2 m n`.
pub fn nef_certificate(n: u64, d: u64, r: u64) -> Result<NefCertificate> {
    DrPair { d, r }.validate(n)?;
    let decomposition = effective_decomposition(n, d, r)?;
    let divisor = class_d_unchecked(d, r, n);
    let curve = class_c(d, r, n)?;
    let np = n as usize;

    let mut checks = Vec::with_capacity(np + 2);
    let dc = divisor.intersect(&curve)?;
    checks.push(PairingCheck {
        identity: "D.C = 0".into(),
        value: dc,
        holds: dc == 0,
    });
    for i in 1..np {
        let v = divisor.intersect(&DivisorClass::difference(i, np))?;
        checks.push(PairingCheck {
            identity: format!("D.(e_{}-e_{}) = 0", i, i + 1),
            value: v,
            holds: v == 0,
        });
    }
    let den = divisor.intersect(&DivisorClass::basis(np, np))?;
    checks.push(PairingCheck {
        identity: format!("D.e_{n} >= 0"),
        value: den,
        holds: den >= 0,
    });

    let mut generators = Vec::new();
    for (g, weight) in decomposition.terms() {
        let class = g.class(d, r, n);
        let pairing_with_d = divisor.intersect(&class)?;
        generators.push(GeneratorPairing {
            generator: g,
            class,
            weight,
            pairing_with_d,
        });
    }
    if let Some(bad) = generators.iter().find(|g| g.pairing_with_d < 0) {
        checks.push(PairingCheck {
            identity: format!("D.({}) >= 0", bad.generator),
            value: bad.pairing_with_d,
            holds: false,
        });
    }
    if let Some(bad) = checks.iter().find(|c| !c.holds) {
        return Err(Error::CertificateCheck(format!(
            "{} fails (value {})",
            bad.identity, bad.value
        )));
    }

    let bound = BoundStatement::new((r * d) as i64, (d * d * n) as i64);
    Ok(NefCertificate {
        n,
        d,
        r,
        divisor,
        curve,
        decomposition,
        generators,
        checks,
        bound,
    })
}

/// Certificate for the `lambda_n` pair `d = floor(sqrt n)`, `r = ceil(d sqrt n)`.
pub fn lambda_certificate(n: u64) -> Result<NefCertificate> {
    let pair = DrPair::for_lambda(n);
    nef_certificate(n, pair.d, pair.r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EasyVariant {
    /// A curve of degree `floor(sqrt n)` through `floor(sqrt n)^2` points.
    A,
    /// A curve of degree `ceil(sqrt n)` through all `n` points.
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EasyCertificate {
    pub n: u64,
    pub variant: EasyVariant,
    /// Degree of the curve through the points.
    pub r: u64,
    /// Number of blown-up points the curve passes through.
    pub points: u64,
    pub curve: DivisorClass,
    pub self_intersection: i64,
    pub bound: BoundStatement,
}

/// Pairing a curve class of nonnegative self-intersection against
/// `d e_0 - m sum e_i` gives `d r >= m r^2` (variant a) or `d r >= m n`
/// (variant b).
pub fn easy_bound_certificate(n: u64, variant: EasyVariant) -> Result<EasyCertificate> {
    if n == 0 {
        return Err(Error::domain(
            "easy_bound_certificate",
            "n must be positive",
        ));
    }
    let (r, points) = match variant {
        EasyVariant::A => {
            let r = isqrt(n);
            (r, r * r)
        }
        EasyVariant::B => (ceil_sqrt(n), n),
    };
    let curve = class_c(r, points, points)?;
    let self_intersection = curve.self_intersection();
    if self_intersection < 0 {
        return Err(Error::CertificateCheck(format!(
            "C^2 = {self_intersection} < 0"
        )));
    }
    Ok(EasyCertificate {
        n,
        variant,
        r,
        points,
        curve,
        self_intersection,
        bound: BoundStatement::new(r as i64, points as i64),
    })
}
