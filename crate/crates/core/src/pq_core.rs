//! (p,q)-integers, factorials, binomials, powers and the (p,q)-derivative.

use crate::error::{Error, Result};
use crate::params::PQParams;
use crate::poly::RatPoly;
use crate::scalar::{Rational, Scalar};

/// `[n]_{p,q} = p^{n-1} + p^{n-2} q + ... + q^{n-1}`.
///
/// Summed term by term rather than as `(p^n - q^n)/(p - q)`, which cancels
/// badly in floating point when `q` approaches `p`.
pub fn pq_int<S: Scalar>(n: u32, params: &PQParams<S>) -> S {
    let (p, q) = (params.p(), params.q());
    // Horner in the ratio-free form: s_{i+1} = p * s_i + q^i.
    let mut acc = S::zero();
    let mut q_pow = S::one();
    for _ in 0..n {
        acc = acc * p.clone() + q_pow.clone();
        q_pow = q_pow * q.clone();
    }
    acc
}

/// `[0]`, `[1]`, ..., `[n]` in one pass.
pub fn pq_ints<S: Scalar>(n: u32, params: &PQParams<S>) -> Vec<S> {
    let (p, q) = (params.p(), params.q());
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = S::zero();
    let mut q_pow = S::one();
    out.push(acc.clone());
    for _ in 0..n {
        acc = acc * p.clone() + q_pow.clone();
        q_pow = q_pow * q.clone();
        out.push(acc.clone());
    }
    out
}

pub fn pq_factorial<S: Scalar>(n: u32, params: &PQParams<S>) -> S {
    pq_ints(n, params)
        .into_iter()
        .skip(1)
        .fold(S::one(), |acc, v| acc * v)
}

/// (p,q)-binomial coefficient via `C(n,k+1) = C(n,k)·[n-k]/[k+1]`.
pub fn pq_binomial<S: Scalar>(n: u32, k: u32, params: &PQParams<S>) -> Result<S> {
    if k > n {
        return Err(Error::BinomialRange { n, k });
    }
    let ints = pq_ints(n, params);
    let k = k.min(n - k) as usize;
    let n = n as usize;
    let mut c = S::one();
    for j in 0..k {
        c = c * ints[n - j].clone() / ints[j + 1].clone();
    }
    Ok(c)
}

/// Row `C(n,0), ..., C(n,n)` of (p,q)-binomials.
pub fn pq_binomial_row<S: Scalar>(n: u32, params: &PQParams<S>) -> Vec<S> {
    let ints = pq_ints(n, params);
    let n = n as usize;
    let mut row = Vec::with_capacity(n + 1);
    let mut c = S::one();
    row.push(c.clone());
    for j in 0..n {
        c = c * ints[n - j].clone() / ints[j + 1].clone();
        row.push(c.clone());
    }
    row
}

/// `(a + x)^n_{p,q} = Π_{s<n} (p^s a + q^s x)` expanded as a polynomial in `x`.
pub fn pq_power_rising(a: &Rational, n: u32, params: &PQParams<Rational>) -> RatPoly {
    let (p, q) = (params.p(), params.q());
    let mut out = RatPoly::one();
    let mut p_pow = Rational::from_u64(1);
    let mut q_pow = Rational::from_u64(1);
    for _ in 0..n {
        let factor = RatPoly::from_coeffs(vec![&p_pow * a, q_pow.clone()]);
        out = &out * &factor;
        p_pow *= p;
        q_pow *= q;
    }
    out
}

/// Termwise `x^k ↦ [k] x^{k-1}`.
pub fn pq_derivative_poly(poly: &RatPoly, params: &PQParams<Rational>) -> RatPoly {
    let deg = match poly.degree() {
        Some(d) => d as u32,
        None => return RatPoly::zero(),
    };
    let ints = pq_ints(deg, params);
    RatPoly::from_coeffs(
        poly.coeffs()
            .iter()
            .zip(&ints)
            .skip(1)
            .map(|(c, k)| c * k)
            .collect(),
    )
}

/// `(f(px) - f(qx)) / ((p - q) x)`; refuses `x = 0`.
pub fn pq_derivative_numeric<S, F>(f: F, x: &S, params: &PQParams<S>) -> Result<S>
where
    S: Scalar,
    F: Fn(&S) -> S,
{
    if x.is_zero() {
        return Err(Error::DerivativeAtZero);
    }
    let (p, q) = (params.p(), params.q());
    let num = f(&(p.clone() * x.clone())) - f(&(q.clone() * x.clone()));
    Ok(num / ((p.clone() - q.clone()) * x.clone()))
}
