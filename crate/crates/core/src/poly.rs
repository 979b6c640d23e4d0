//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

/// Polynomial in one variable, `coeffs[i]` multiplying `x^i`.
///
/// Always canonical: no trailing zero coefficient, and the zero polynomial is
/// the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&(n, d)| Rational::from_ratio(n, d))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation in any scalar mode; coefficients are converted first.
    pub fn eval_in<S: Scalar>(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + S::from_rational(c))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// The polynomial `x ↦ self(c·x)`.
    pub fn compose_scale(&self, c: &Rational) -> Self {
        let mut power = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &power);
            power *= c;
        }
        Self::from_coeffs(out)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        RatPoly { coeffs }
    }

    /// Ordinary derivative.
    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_u64(k as u64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Euclidean division; `None` if `divisor` is zero.
    pub fn div_rem(&self, divisor: &RatPoly) -> Option<(RatPoly, RatPoly)> {
        let dd = divisor.degree()?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return Some((Self::zero(), Self::zero()));
        };
        if sd < dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let c = &rem[i + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Some((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;

    fn add(self, rhs: &RatPoly) -> RatPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (a, b) in coeffs.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        RatPoly::from_coeffs(coeffs)
    }
}

impl Add for RatPoly {
    type Output = RatPoly;

    fn add(self, rhs: RatPoly) -> RatPoly {
        &self + &rhs
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;

    fn neg(self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for RatPoly {
    type Output = RatPoly;

    fn neg(self) -> RatPoly {
        -&self
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;

    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs)
    }
}

impl Sub for RatPoly {
    type Output = RatPoly;

    fn sub(self, rhs: RatPoly) -> RatPoly {
        &self - &rhs
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;

    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly::from_coeffs(coeffs)
    }
}

impl Mul for RatPoly {
    type Output = RatPoly;

    fn mul(self, rhs: RatPoly) -> RatPoly {
        &self * &rhs
    }
}

/// Polynomial in two variables `(t, y)`, stored as `terms[i]` = coefficient
/// of `t^i`, itself a polynomial in `y`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: Vec<RatPoly>,
}

impl BiPoly {
    pub fn one() -> Self {
        BiPoly {
            terms: vec![RatPoly::one()],
        }
    }

    pub fn from_terms(mut terms: Vec<RatPoly>) -> Self {
        while terms.last().is_some_and(RatPoly::is_zero) {
            terms.pop();
        }
        BiPoly { terms }
    }

    /// `a·t + b·y` with rational `a`, `b`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::from_terms(vec![RatPoly::monomial(b, 1), RatPoly::constant(a)])
    }

    /// Embeds `g(t)` with constant `y`-coefficients.
    pub fn from_t_poly(g: &RatPoly) -> Self {
        Self::from_terms(g.coeffs().iter().cloned().map(RatPoly::constant).collect())
    }

    pub fn terms(&self) -> &[RatPoly] {
        &self.terms
    }

    pub fn mul(&self, rhs: &BiPoly) -> BiPoly {
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return BiPoly::default();
        }
        let mut terms = vec![RatPoly::zero(); self.terms.len() + rhs.terms.len() - 1];
        for (i, a) in self.terms.iter().enumerate() {
            for (j, b) in rhs.terms.iter().enumerate() {
                terms[i + j] = &terms[i + j] + &(a * b);
            }
        }
        BiPoly::from_terms(terms)
    }

    pub fn eval(&self, t: &Rational, y: &Rational) -> Rational {
        self.terms
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c.eval(y))
    }

    pub fn scale(&self, c: &Rational) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|p| p.scale(c)).collect())
    }

    pub fn add(&self, rhs: &BiPoly) -> BiPoly {
        let len = self.terms.len().max(rhs.terms.len());
        let zero = RatPoly::zero();
        BiPoly::from_terms(
            (0..len)
                .map(|i| {
                    let a = self.terms.get(i).unwrap_or(&zero);
                    let b = rhs.terms.get(i).unwrap_or(&zero);
                    a + b
                })
                .collect(),
        )
    }
}
