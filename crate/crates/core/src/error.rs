use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("no tabulated exact value for n = {n} (table covers 1 <= n <= 9)")]
    SmallNOutOfRange { n: u64 },

    #[error("invalid (d, r) certificate for n = {n}: d = {d}, r = {r}: {reason}")]
    InvalidPair {
        n: u64,
        d: u64,
        r: u64,
        reason: String,
    },

    #[error("closed form for ceil(m * lambda) not established at m = {m}, s = {s}")]
    ClosedFormOutOfRange { m: u64, s: u64 },

    #[error("certificate check failed: {0}")]
    CertificateCheck(String),

    #[error("divisor classes live on different surfaces ({left} vs {right} points)")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("engines disagree at m = {m}, n = {n}: naive R = {naive}, block R = {block}")]
    EngineDisagreement {
        m: u64,
        n: u64,
        naive: u64,
        block: u64,
        diff: String,
    },

    #[error("lambda_{n} - r({n}) = {difference} is not positive")]
    LambdaNotAboveR { n: u64, difference: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }
}
