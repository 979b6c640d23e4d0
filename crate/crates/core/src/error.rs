use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters p={p}, q={q}: require 0 < q < p <= 1")]
    InvalidParams { p: String, q: String },

    #[error("evaluation point x={0} lies outside [0, 1]")]
    OutOfDomain(String),

    #[error("binomial index k={k} out of range for n={n}")]
    BinomialRange { n: u32, k: u32 },

    #[error("the (p,q)-derivative is undefined at x = 0")]
    DerivativeAtZero,

    #[error("operator degree must be at least 1, got {0}")]
    DegreeTooSmall(u32),

    #[error("order r={r} exceeds the available derivatives (r_max={r_max})")]
    OrderTooHigh { r: usize, r_max: usize },

    #[error("moment structure violated for n={n}, m={m}, p={p}, q={q}: {reason}")]
    StructureViolation {
        n: u32,
        m: u32,
        p: String,
        q: String,
        reason: String,
    },

    #[error("rate fit needs at least 4 records with positive error, found {0}")]
    DegenerateFit(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
