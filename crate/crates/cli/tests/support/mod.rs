//! Reference implementations used only by the acceptance suite. Each is
//! written from the defining formula and shares no evaluation path with
//! the library.
#![allow(dead_code)]

use num_traits::{One, Zero};
use pqapprox_core::{ratio, PQParams, Rational, Scalar};

pub fn exact_grid() -> Vec<PQParams<Rational>> {
    [((1, 1), (1, 2)), ((3, 4), (1, 2)), ((9, 10), (2, 3)), ((1, 1), (9, 10)), ((99, 100), (49, 50))]
        .into_iter()
        .map(|(p, q)| PQParams::from_ratios(p, q).unwrap())
        .collect()
}

pub fn bracket(n: u32, pq: &PQParams<Rational>) -> Rational {
    let (p, q) = (pq.p(), pq.q());
    (p.powu(u64::from(n)) - q.powu(u64::from(n))) / (p - q)
}

pub fn binomial(n: u32, k: u32, pq: &PQParams<Rational>) -> Rational {
    let fact = |m: u32| (1..=m).fold(Rational::one(), |acc, i| acc * bracket(i, pq));
    fact(n) / (fact(k) * fact(n - k))
}

/// `Π_{s<n} (p^s a + q^s x)`.
pub fn rising(a: &Rational, n: u32, pq: &PQParams<Rational>, x: &Rational) -> Rational {
    let (p, q) = (pq.p(), pq.q());
    (0..n).fold(Rational::one(), |acc, s| {
        acc * (p.powu(u64::from(s)) * a + q.powu(u64::from(s)) * x)
    })
}

/// `(f(px) - f(qx)) / ((p - q) x)`.
pub fn divided_difference(f: impl Fn(&Rational) -> Rational, pq: &PQParams<Rational>, x: &Rational) -> Rational {
    let (p, q) = (pq.p(), pq.q());
    (f(&(p * x)) - f(&(q * x))) / ((p - q) * x)
}

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

pub fn node(n: u32, k: u32, pq: &PQParams<Rational>) -> Rational {
    let p = pq.p();
    let shift = if k >= n {
        p.powu(u64::from(k - n))
    } else {
        p.powu(u64::from(n - k)).recip()
    };
    bracket(k, pq) / (shift * bracket(n, pq))
}

/// `Σ_k w_k Π_{s<m} (p^s x_k - q^s x)` by brute force.
pub fn pq_moment_direct(n: u32, m: u32, pq: &PQParams<Rational>, x: &Rational) -> Rational {
    let (p, q) = (pq.p(), pq.q());
    (0..=n).fold(Rational::zero(), |acc, k| {
        let t = node(n, k, pq);
        let kernel = (0..m).fold(Rational::one(), |a, s| {
            a * (p.powu(u64::from(s)) * &t - q.powu(u64::from(s)) * x)
        });
        acc + weight(n, k, pq, x) * kernel
    })
}

/// q-Bernstein polynomial with Gaussian binomials built by q-Pascal.
pub fn q_bernstein(f: impl Fn(f64) -> f64, n: usize, q: f64, x: f64) -> f64 {
    let mut row = vec![1.0_f64];
    for m in 1..=n {
        let mut next = vec![1.0_f64; m + 1];
        for k in 1..m {
            next[k] = row[k - 1] + q.powi(k as i32) * row[k];
        }
        row = next;
    }
    let q_int = |k: usize| (0..k).map(|i| q.powi(i as i32)).sum::<f64>();
    (0..=n)
        .map(|k| {
            let tail: f64 = (0..n - k).map(|s| 1.0 - q.powi(s as i32) * x).product();
            row[k] * x.powi(k as i32) * tail * f(q_int(k) / q_int(n))
        })
        .sum()
}

pub fn classical_bernstein(f: impl Fn(f64) -> f64, n: usize, x: f64) -> f64 {
    let mut c = 1.0_f64;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            c = c * (n - k + 1) as f64 / k as f64;
        }
        total += c * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32) * f(k as f64 / n as f64);
    }
    total
}

/// Deterministic walk used in place of a random generator.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    fn step(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }

    pub fn unit(&mut self) -> f64 {
        (self.step() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// A rational strictly inside (0, 1).
    pub fn interior(&mut self) -> Rational {
        let s = self.step();
        let den = 2 + (s >> 33) % 97;
        let num = 1 + (s >> 13) % (den - 1);
        ratio(num as i64, den as i64)
    }
}
