//! Oracles shared by the integration tests. Written directly from the
//! defining formulas, independently of the library's evaluation paths.
#![allow(dead_code)]

use num_traits::{One, Zero};
use pqapprox_core::{ratio, PQParams, Rational, Scalar};

/// The five parameter pairs used by the exact identity suites.
pub fn exact_grid() -> Vec<PQParams<Rational>> {
    [((1, 1), (1, 2)), ((3, 4), (1, 2)), ((9, 10), (2, 3)), ((1, 1), (9, 10)), ((99, 100), (49, 50))]
        .into_iter()
        .map(|(p, q)| PQParams::from_ratios(p, q).unwrap())
        .collect()
}

/// `(p^n - q^n) / (p - q)`.
pub fn bracket(n: u32, pq: &PQParams<Rational>) -> Rational {
    let (p, q) = (pq.p(), pq.q());
    (p.powu(u64::from(n)) - q.powu(u64::from(n))) / (p - q)
}

pub fn factorial(n: u32, pq: &PQParams<Rational>) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| acc * bracket(i, pq))
}

pub fn binomial(n: u32, k: u32, pq: &PQParams<Rational>) -> Rational {
    factorial(n, pq) / (factorial(k, pq) * factorial(n - k, pq))
}

/// `P_{n,k}(p,q;x) / p^{n(n-1)/2}` straight from the definition.
pub fn weight(n: u32, k: u32, pq: &PQParams<Rational>, x: &Rational) -> Rational {
    let (p, q) = (pq.p(), pq.q());
    let mut prod = Rational::one();
    for s in 0..(n - k) {
        prod *= p.powu(u64::from(s)) - q.powu(u64::from(s)) * x;
    }
    let own = p.powu(u64::from(k * k.saturating_sub(1) / 2));
    let norm = p.powu(u64::from(n * (n - 1) / 2));
    own * binomial(n, k, pq) * x.powu(u64::from(k)) * prod / norm
}

/// `[k] / (p^{k-n} [n])`, with the negative power taken literally.
pub fn node(n: u32, k: u32, pq: &PQParams<Rational>) -> Rational {
    let p = pq.p();
    let shift = if k >= n {
        p.powu(u64::from(k - n))
    } else {
        p.powu(u64::from(n - k)).recip()
    };
    bracket(k, pq) / (shift * bracket(n, pq))
}

pub fn apply_direct(f: impl Fn(&Rational) -> Rational, n: u32, pq: &PQParams<Rational>, x: &Rational) -> Rational {
    (0..=n).fold(Rational::zero(), |acc, k| acc + weight(n, k, pq, x) * f(&node(n, k, pq)))
}

/// `Σ_k w_k Π_{s<m} (p^s x_k - q^s x)`.
pub fn pq_moment_direct(n: u32, m: u32, pq: &PQParams<Rational>, x: &Rational) -> Rational {
    let (p, q) = (pq.p().clone(), pq.q().clone());
    apply_direct(
        |t| {
            (0..m).fold(Rational::one(), |acc, s| {
                acc * (p.powu(u64::from(s)) * t - q.powu(u64::from(s)) * x)
            })
        },
        n,
        pq,
        x,
    )
}

/// Rational points strictly inside (0, 1) from a fixed linear congruential walk.
pub fn interior_points(count: usize, seed: u64) -> Vec<Rational> {
    let mut state = seed;
    (0..count)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let den = 2 + (state >> 33) % 97;
            let num = 1 + (state >> 13) % (den - 1);
            ratio(num as i64, den as i64)
        })
        .collect()
}
