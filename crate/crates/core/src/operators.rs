//! The revised (p,q)-Bernstein operator, its r-th order generalization, and
//! the classical and q-Bernstein operators it reduces to.

use std::fmt;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::params::PQParams;
use crate::poly::{BiPoly, RatPoly};
use crate::pq_core::{pq_binomial_row, pq_ints, pq_power_rising};
use crate::scalar::{Rational, Scalar};

/// Scalars for which the basis weights can be evaluated.
///
/// The exact backend multiplies the defining products out; the float backend
/// works in the log domain so that neither `P_{n,k}` nor the normalizer
/// `p^{n(n-1)/2}` underflows for large `n`.
pub trait BasisScalar: Scalar {
    fn raw_basis_weights(n: u32, params: &PQParams<Self>, x: &Self) -> Vec<Self>;
}

impl BasisScalar for Rational {
    fn raw_basis_weights(n: u32, params: &PQParams<Self>, x: &Self) -> Vec<Self> {
        let (p, q) = (params.p(), params.q());
        let nu = n as usize;
        let binom = pq_binomial_row(n, params);
        // prod[j] = Π_{s<j} (p^s - q^s x)
        let mut prod = Vec::with_capacity(nu + 1);
        let (mut acc, mut p_pow, mut q_pow) = (Rational::one(), Rational::one(), Rational::one());
        prod.push(acc.clone());
        for _ in 0..nu {
            acc *= &p_pow - &q_pow * x;
            prod.push(acc.clone());
            p_pow *= p;
            q_pow *= q;
        }
        let p_inv = p.recip();
        let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
        let mut x_pow = Rational::one();
        let mut out = Vec::with_capacity(nu + 1);
        for k in 0..=nu {
            let own = (k as u64) * (k as u64).saturating_sub(1) / 2;
            let w = p_inv.powu(total - own) * &binom[k] * &x_pow * &prod[nu - k];
            out.push(w);
            x_pow *= x;
        }
        out
    }
}

impl BasisScalar for f64 {
    fn raw_basis_weights(n: u32, params: &PQParams<Self>, x: &Self) -> Vec<Self> {
        let nu = n as usize;
        let x = *x;
        if x == 0.0 || x == 1.0 {
            let mut w = vec![0.0; nu + 1];
            w[if x == 0.0 { 0 } else { nu }] = 1.0;
            return w;
        }
        let (p, q) = (*params.p(), *params.q());
        let ln_p = p.ln();
        let ln_x = x.ln();

        let ints = pq_ints(n, params);
        let mut ln_fact = Vec::with_capacity(nu + 1);
        ln_fact.push(0.0);
        for i in 1..=nu {
            ln_fact.push(ln_fact[i - 1] + ints[i].ln());
        }

        // log_prod[j] = Σ_{s<j} ln(p^s - q^s x); -inf once a factor vanishes.
        let mut log_prod = Vec::with_capacity(nu + 1);
        let (mut acc, mut p_pow, mut q_pow) = (0.0_f64, 1.0_f64, 1.0_f64);
        log_prod.push(acc);
        for _ in 0..nu {
            let factor = p_pow - q_pow * x;
            acc += if factor > 0.0 { factor.ln() } else { f64::NEG_INFINITY };
            log_prod.push(acc);
            p_pow *= p;
            q_pow *= q;
        }

        let total = (nu * nu.saturating_sub(1) / 2) as f64;
        let mut w: Vec<f64> = (0..=nu)
            .map(|k| {
                let tail = log_prod[nu - k];
                if tail == f64::NEG_INFINITY {
                    return 0.0;
                }
                let own = (k * k.saturating_sub(1) / 2) as f64;
                let ln_binom = ln_fact[nu] - ln_fact[k] - ln_fact[nu - k];
                ((own - total) * ln_p + ln_binom + k as f64 * ln_x + tail).exp()
            })
            .collect();
        // Always renormalize: a sum off by even 1e-13 shows up as spurious
        // error on exactly reproduced polynomials.
        let sum: f64 = w.iter().sum();
        if sum > 0.0 && sum != 1.0 {
            w.iter_mut().for_each(|v| *v /= sum);
        }
        w
    }
}

/// Normalized basis `w_k = P_{n,k}(p,q;x) / p^{n(n-1)/2}` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisWeights<S> {
    pub n: u32,
    pub x: S,
    pub w: Vec<S>,
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::DegreeTooSmall(n));
    }
    Ok(())
}

fn check_unit_interval<S: Scalar>(x: &S) -> Result<()> {
    if *x < S::zero() || *x > S::one() {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    Ok(())
}

pub fn basis_weights<S: BasisScalar>(n: u32, params: &PQParams<S>, x: &S) -> Result<BasisWeights<S>> {
    check_degree(n)?;
    check_unit_interval(x)?;
    Ok(BasisWeights {
        n,
        x: x.clone(),
        w: S::raw_basis_weights(n, params, x),
    })
}

/// Sample points `x_{n,k} = p^{n-k}[k]/[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<S> {
    pub n: u32,
    pub nodes: Vec<S>,
}

/// `x_k = p^{n-k}[k]/[n]`, evaluated as `S_k/S_n` with `S_k = Σ_{i<k} (q/p)^i`.
/// The partial sums only grow, so float nodes stay ordered even where
/// neighbours differ by less than an ulp.
pub fn nodes<S: Scalar>(n: u32, params: &PQParams<S>) -> Result<NodeSet<S>> {
    check_degree(n)?;
    let rho = params.q().clone() / params.p().clone();
    let mut sums = Vec::with_capacity(n as usize + 1);
    let (mut partial, mut term) = (S::zero(), S::one());
    sums.push(partial.clone());
    for _ in 0..n {
        partial = partial + term.clone();
        term = term * rho.clone();
        sums.push(partial.clone());
    }
    let total = partial;
    let nodes = sums.into_iter().map(|s| s / total.clone()).collect();
    Ok(NodeSet { n, nodes })
}

/// `B_{n,p,q}(f; x)`.
pub fn apply<S, F>(f: F, n: u32, params: &PQParams<S>, x: &S) -> Result<S>
where
    S: BasisScalar,
    F: Fn(&S) -> S,
{
    let weights = basis_weights(n, params, x)?;
    let nodes = nodes(n, params)?;
    Ok(weighted_sum(&weights.w, &nodes.nodes, |_, t| f(t)))
}

fn weighted_sum<S: Scalar>(w: &[S], nodes: &[S], mut g: impl FnMut(usize, &S) -> S) -> S {
    w.iter()
        .zip(nodes)
        .enumerate()
        .filter(|(_, (wk, _))| !wk.is_zero())
        .fold(S::zero(), |acc, (k, (wk, t))| acc + wk.clone() * g(k, t))
}

pub type ScalarFn<S> = Arc<dyn Fn(&S) -> S + Send + Sync>;

/// Declares `|g(x) - g(y)| <= m |x - y|^alpha` for the top derivative `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub m: f64,
    pub alpha: f64,
}

/// A target function with analytic derivatives `f^(1), ..., f^(r_max)`.
#[derive(Clone)]
pub struct FunctionBundle<S> {
    name: String,
    f: ScalarFn<S>,
    derivs: Vec<ScalarFn<S>>,
    lip: Option<Lipschitz>,
}

impl<S> fmt::Debug for FunctionBundle<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionBundle")
            .field("name", &self.name)
            .field("r_max", &self.derivs.len())
            .field("lip", &self.lip)
            .finish()
    }
}

impl<S: Scalar> FunctionBundle<S> {
    pub fn new(name: impl Into<String>, f: ScalarFn<S>, derivs: Vec<ScalarFn<S>>) -> Self {
        FunctionBundle {
            name: name.into(),
            f,
            derivs,
            lip: None,
        }
    }

    /// Bundle for a polynomial, with derivatives up to `r_max` taken exactly.
    pub fn from_poly(name: impl Into<String>, poly: &RatPoly, r_max: usize) -> Self {
        let mut current = poly.clone();
        let make = |p: RatPoly| -> ScalarFn<S> { Arc::new(move |x: &S| p.eval_in(x)) };
        let f = make(current.clone());
        let mut derivs = Vec::with_capacity(r_max);
        for _ in 0..r_max {
            current = current.derivative();
            derivs.push(make(current.clone()));
        }
        Self::new(name, f, derivs)
    }

    pub fn with_lipschitz(mut self, m: f64, alpha: f64) -> Self {
        self.lip = Some(Lipschitz { m, alpha });
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn r_max(&self) -> usize {
        self.derivs.len()
    }

    pub fn lipschitz(&self) -> Option<Lipschitz> {
        self.lip
    }

    pub fn eval(&self, x: &S) -> S {
        (self.f)(x)
    }

    /// `f^(i)`, with `i = 0` giving `f` itself.
    pub fn derivative(&self, i: usize) -> Result<&ScalarFn<S>> {
        match i {
            0 => Ok(&self.f),
            _ => self.derivs.get(i - 1).ok_or(Error::OrderTooHigh {
                r: i,
                r_max: self.r_max(),
            }),
        }
    }
}

impl FunctionBundle<f64> {
    /// Largest mismatch between each declared derivative and a central
    /// difference of the one below it, measured as
    /// `|fd - d| / max(1, |d|)` over interior points.
    pub fn derivative_mismatch(&self, step: f64, points: usize) -> f64 {
        let mut worst = 0.0_f64;
        for i in 1..=self.r_max() {
            let (lower, upper) = (&self.derivative(i - 1).unwrap(), &self.derivative(i).unwrap());
            for j in 1..points {
                let x = j as f64 / points as f64;
                let fd = (lower(&(x + step)) - lower(&(x - step))) / (2.0 * step);
                let d = upper(&x);
                worst = worst.max((fd - d).abs() / d.abs().max(1.0));
            }
        }
        worst
    }
}

/// `B^{[r]}_{n,p,q}(f; x) = Σ_k w_k Σ_{i<=r} f^(i)(x_k) (x - x_k)^i / i!`.
pub fn apply_higher<S: BasisScalar>(
    bundle: &FunctionBundle<S>,
    r: usize,
    n: u32,
    params: &PQParams<S>,
    x: &S,
) -> Result<S> {
    if r > bundle.r_max() {
        return Err(Error::OrderTooHigh {
            r,
            r_max: bundle.r_max(),
        });
    }
    let weights = basis_weights(n, params, x)?;
    let nodes = nodes(n, params)?;
    let derivs: Vec<&ScalarFn<S>> = (0..=r).map(|i| bundle.derivative(i)).collect::<Result<_>>()?;
    Ok(weighted_sum(&weights.w, &nodes.nodes, |_, t| {
        taylor_at_node(&derivs, t, x)
    }))
}

pub(crate) fn taylor_at_node<S: Scalar>(derivs: &[&ScalarFn<S>], t: &S, x: &S) -> S {
    let d = x.clone() - t.clone();
    let mut power = S::one();
    let mut fact = S::one();
    let mut sum = S::zero();
    for (i, g) in derivs.iter().enumerate() {
        if i > 0 {
            power = power * d.clone();
            fact = fact * S::from_u64(i as u64);
        }
        sum = sum + g(t) * power.clone() / fact.clone();
    }
    sum
}

/// Exact symbolic images under `B_{n,p,q}`, with the basis polynomials
/// expanded once and reused.
#[derive(Debug, Clone)]
pub struct BernsteinImage {
    n: u32,
    params: PQParams<Rational>,
    weight_polys: Vec<RatPoly>,
    nodes: Vec<Rational>,
}

impl BernsteinImage {
    pub fn new(n: u32, params: &PQParams<Rational>) -> Result<Self> {
        check_degree(n)?;
        let nu = n as usize;
        let binom = pq_binomial_row(n, params);
        let p_inv = params.p().recip();
        let total = (n as u64) * (n as u64 - 1) / 2;
        let one = Rational::one();
        let weight_polys = (0..=nu)
            .map(|k| {
                let own = (k as u64) * (k as u64).saturating_sub(1) / 2;
                let c = p_inv.powu(total - own) * &binom[k];
                // Π_{s<n-k} (p^s - q^s x) is the rising power (1 + x)^{n-k} at -x.
                let tail = pq_power_rising(&one, (nu - k) as u32, params).compose_scale(&-&one);
                tail.shift(k).scale(&c)
            })
            .collect();
        Ok(BernsteinImage {
            n,
            params: params.clone(),
            weight_polys,
            nodes: nodes(n, params)?.nodes,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> &PQParams<Rational> {
        &self.params
    }

    pub fn weight_polys(&self) -> &[RatPoly] {
        &self.weight_polys
    }

    /// `B(t^j; x)` as a polynomial in `x`.
    pub fn monomial(&self, j: usize) -> RatPoly {
        self.weight_polys
            .iter()
            .zip(&self.nodes)
            .fold(RatPoly::zero(), |acc, (w, t)| &acc + &w.scale(&t.powu(j as u64)))
    }

    pub fn apply(&self, poly: &RatPoly) -> RatPoly {
        self.weight_polys
            .iter()
            .zip(&self.nodes)
            .fold(RatPoly::zero(), |acc, (w, t)| &acc + &w.scale(&poly.eval(t)))
    }

    /// For `g(t, y)`, the polynomial `x ↦ B(g(·, y_scale·x); z_scale·x)`.
    pub fn apply_bivariate(&self, g: &BiPoly, z_scale: &Rational, y_scale: &Rational) -> RatPoly {
        g.terms()
            .iter()
            .enumerate()
            .fold(RatPoly::zero(), |acc, (i, coeff)| {
                let image = self.monomial(i).compose_scale(z_scale);
                &acc + &(&image * &coeff.compose_scale(y_scale))
            })
    }
}

/// Exact image `x ↦ B_{n,p,q}(poly; x)`.
pub fn apply_poly(poly: &RatPoly, n: u32, params: &PQParams<Rational>) -> Result<RatPoly> {
    Ok(BernsteinImage::new(n, params)?.apply(poly))
}

/// Exact image `x ↦ B^{[r]}_{n,p,q}(poly; x)` of a polynomial.
pub fn apply_higher_poly(poly: &RatPoly, r: usize, n: u32, params: &PQParams<Rational>) -> Result<RatPoly> {
    let image = BernsteinImage::new(n, params)?;
    let one = Rational::one();
    let y_minus_t = BiPoly::linear(-&one, one.clone());
    let mut deriv = poly.clone();
    let mut factor = BiPoly::one();
    let mut fact = Rational::one();
    let mut out = RatPoly::zero();
    for i in 0..=r {
        if i > 0 {
            deriv = deriv.derivative();
            factor = factor.mul(&y_minus_t);
            fact *= Rational::from_u64(i as u64);
        }
        let g = BiPoly::from_t_poly(&deriv).mul(&factor);
        out = &out + &image.apply_bivariate(&g, &one, &one).scale(&fact.recip());
    }
    Ok(out)
}

/// Phillips q-Bernstein operator, written independently of the (p,q) code.
pub fn q_bernstein_oracle(f: impl Fn(f64) -> f64, n: u32, q: f64, x: f64) -> f64 {
    let n = n as usize;
    let q_int = |k: usize| (1.0 - q.powi(k as i32)) / (1.0 - q);
    // Gaussian binomials by the q-Pascal rule [n,k] = [n-1,k-1] + q^k [n-1,k].
    let mut row = vec![1.0_f64];
    for m in 1..=n {
        let mut next = vec![1.0; m + 1];
        for k in 1..m {
            next[k] = row[k - 1] + q.powi(k as i32) * row[k];
        }
        row = next;
    }
    (0..=n)
        .map(|k| {
            let tail: f64 = (0..n - k).map(|s| 1.0 - q.powi(s as i32) * x).product();
            row[k] * x.powi(k as i32) * tail * f(q_int(k) / q_int(n))
        })
        .sum()
}

/// Classical Bernstein operator.
pub fn classical_bernstein_oracle(f: impl Fn(f64) -> f64, n: u32, x: f64) -> f64 {
    let n = n as usize;
    let mut row = vec![1.0_f64];
    for m in 1..=n {
        let mut next = vec![1.0; m + 1];
        for k in 1..m {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    (0..=n)
        .map(|k| {
            row[k] * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32) * f(k as f64 / n as f64)
        })
        .sum()
}
