use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Rational, Scalar};

/// The deformation pair `(p, q)` with `0 < q < p <= 1`.
///
/// The arithmetic mode is carried by the scalar type: `PQParams<f64>` is the
/// floating-point mode and `PQParams<Rational>` the exact one.
#[derive(Debug, Clone, PartialEq)]
pub struct PQParams<S> {
    p: S,
    q: S,
}

impl<S: Scalar> PQParams<S> {
    pub fn new(p: S, q: S) -> Result<Self> {
        let valid = q > S::zero() && q < p && p <= S::one();
        if !valid {
            return Err(Error::InvalidParams {
                p: p.to_string(),
                q: q.to_string(),
            });
        }
        Ok(PQParams { p, q })
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    pub fn to_float(&self) -> PQParams<f64> {
        PQParams {
            p: self.p.to_f64(),
            q: self.q.to_f64(),
        }
    }
}

impl PQParams<Rational> {
    pub fn from_ratios(p: (i64, i64), q: (i64, i64)) -> Result<Self> {
        Self::new(
            Rational::from_ratio(p.0, p.1),
            Rational::from_ratio(q.0, q.1),
        )
    }
}

impl<S: Scalar> fmt::Display for PQParams<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, q={})", self.p, self.q)
    }
}
