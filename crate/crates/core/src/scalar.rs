//! Arithmetic backends. `f64` is the floating-point mode, [`Rational`] the
//! exact mode; every identity check runs on `Rational`.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Float,
    Rational,
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Float => f.write_str("float"),
            Mode::Rational => f.write_str("rational"),
        }
    }
}

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    const MODE: Mode;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    fn from_u64(n: u64) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn powu(&self, e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powu(&self, e: u64) -> Self {
        if e <= i32::MAX as u64 {
            self.powi(e as i32)
        } else {
            self.powf(e as f64)
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Shorthand for an exact `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}
