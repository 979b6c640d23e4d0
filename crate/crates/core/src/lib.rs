//! Revised (p,q)-Bernstein operators and their r-th order generalization.
//!
//! * [`pq_core`]: (p,q)-integers, binomials, rising powers, the (p,q)-derivative.
//! * [`operators`]: the basis, the nodes, `B_{n,p,q}` and `B^{[r]}_{n,p,q}`.
//! * [`moments`]: exact central moments and their recurrence/structure checks.
//! * [`convergence`]: moduli of continuity, error-bound and rate experiments.
//! * [`corpus`]: the built-in target functions.

pub mod convergence;
pub mod corpus;
pub mod error;
pub mod moments;
pub mod operators;
pub mod params;
pub mod poly;
pub mod pq_core;
pub mod scalar;

pub use error::{Error, Result};
pub use params::PQParams;
pub use poly::{BiPoly, RatPoly};
pub use scalar::{ratio, Mode, Rational, Scalar};

/// Library version, echoed into experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
