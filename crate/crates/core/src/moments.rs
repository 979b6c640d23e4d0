//! Central moments of the revised (p,q)-Bernstein operator.
//!
//! Symbolic moments are exact polynomials in `x`; they back the recurrence
//! and divisibility checks. Pointwise moments (signed and absolute) are direct
//! weighted sums and back the constant estimates.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::{basis_weights, nodes, BasisScalar, BernsteinImage};
use crate::params::PQParams;
use crate::poly::{BiPoly, RatPoly};
use crate::pq_core::{pq_derivative_poly, pq_int};
use crate::scalar::{Rational, Scalar};

/// Grid used for constant estimates: `x = i/1024`, `i = 1..1023`.
pub const CONSTANT_GRID: usize = 1024;

/// Which power of `t - x` a moment is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentKind {
    /// `(t - x)^m_{p,q} = Π_{s<m} (p^s t - q^s x)`
    PQPower,
    /// `(t - x)^m`
    Ordinary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentPoly {
    pub n: u32,
    pub m: u32,
    pub kind: MomentKind,
    pub poly: RatPoly,
}

/// `Π_{s<m} (p^s t - q^s y)` (or `(t - y)^m`) as a polynomial in `(t, y)`.
pub fn kernel(m: u32, kind: MomentKind, params: &PQParams<Rational>) -> BiPoly {
    let (p, q) = (params.p(), params.q());
    let mut out = BiPoly::one();
    let (mut p_pow, mut q_pow) = (Rational::one(), Rational::one());
    for _ in 0..m {
        let factor = match kind {
            MomentKind::PQPower => BiPoly::linear(p_pow.clone(), -q_pow.clone()),
            MomentKind::Ordinary => BiPoly::linear(Rational::one(), -Rational::one()),
        };
        out = out.mul(&factor);
        p_pow *= p;
        q_pow *= q;
    }
    out
}

fn moment_from_image(image: &BernsteinImage, m: u32, kind: MomentKind) -> MomentPoly {
    let one = Rational::one();
    MomentPoly {
        n: image.n(),
        m,
        kind,
        poly: image.apply_bivariate(&kernel(m, kind, image.params()), &one, &one),
    }
}

/// `B((t - x)^m_{p,q}; x)` as an exact polynomial.
pub fn central_moment_pq(n: u32, m: u32, params: &PQParams<Rational>) -> Result<MomentPoly> {
    let image = BernsteinImage::new(n, params)?;
    Ok(moment_from_image(&image, m, MomentKind::PQPower))
}

/// `B((t - x)^m; x)` as an exact polynomial.
pub fn central_moment_ordinary(n: u32, m: u32, params: &PQParams<Rational>) -> Result<MomentPoly> {
    let image = BernsteinImage::new(n, params)?;
    Ok(moment_from_image(&image, m, MomentKind::Ordinary))
}

/// Signed moment at a single point, by direct summation over the nodes.
pub fn central_moment_at<S: BasisScalar>(
    n: u32,
    m: u32,
    params: &PQParams<S>,
    x: &S,
    kind: MomentKind,
) -> Result<S> {
    let w = basis_weights(n, params, x)?.w;
    let ns = nodes(n, params)?.nodes;
    Ok(w.iter()
        .zip(&ns)
        .fold(S::zero(), |acc, (wk, t)| acc + wk.clone() * kernel_at(m, kind, params, t, x)))
}

/// Absolute moment at a point: `Σ_k w_k Π_{s<m} |p^s x_k - q^s x|` for
/// [`MomentKind::PQPower`], `Σ_k w_k |x_k - x|^m` for [`MomentKind::Ordinary`].
pub fn absolute_moment<S: BasisScalar>(
    n: u32,
    m: u32,
    params: &PQParams<S>,
    x: &S,
    kind: MomentKind,
) -> Result<S> {
    let w = basis_weights(n, params, x)?.w;
    let ns = nodes(n, params)?.nodes;
    Ok(w.iter().zip(&ns).fold(S::zero(), |acc, (wk, t)| {
        acc + wk.clone() * abs_kernel_at(m, kind, params, t, x)
    }))
}

fn kernel_at<S: Scalar>(m: u32, kind: MomentKind, params: &PQParams<S>, t: &S, x: &S) -> S {
    let (mut acc, mut p_pow, mut q_pow) = (S::one(), S::one(), S::one());
    for _ in 0..m {
        acc = acc
            * match kind {
                MomentKind::PQPower => p_pow.clone() * t.clone() - q_pow.clone() * x.clone(),
                MomentKind::Ordinary => t.clone() - x.clone(),
            };
        p_pow = p_pow * params.p().clone();
        q_pow = q_pow * params.q().clone();
    }
    acc
}

fn abs_kernel_at<S: Scalar>(m: u32, kind: MomentKind, params: &PQParams<S>, t: &S, x: &S) -> S {
    let (mut acc, mut p_pow, mut q_pow) = (S::one(), S::one(), S::one());
    for _ in 0..m {
        acc = acc
            * match kind {
                MomentKind::PQPower => (p_pow.clone() * t.clone() - q_pow.clone() * x.clone()).abs(),
                MomentKind::Ordinary => (t.clone() - x.clone()).abs(),
            };
        p_pow = p_pow * params.p().clone();
        q_pow = q_pow * params.q().clone();
    }
    acc
}

/// Left side minus right side of the moment recurrence
///
/// ```text
/// B((t-x)^{m+1}; x) = p^{m+n} x(1-x)/[n] · D_{p,q}{ B((t - x/p)^m; x/p) }
///                   + p^{m+n-1} [m] x(1-x)/[n] · B((t - qx/p)^{m-1}; qx/p)
///                   + [m](p^n - q^n) x/[n] · B((t-x)^m; x)
/// ```
///
/// with all (p,q)-powers. The shifted moments are obtained by exact
/// substitution into the operator image of `Π_s (p^s t - q^s y)`.
pub fn lemma2_residual(n: u32, m: u32, params: &PQParams<Rational>) -> Result<RatPoly> {
    if m == 0 {
        return Err(Error::InvalidArgument("recurrence requires m >= 1".into()));
    }
    let image = BernsteinImage::new(n, params)?;
    let (p, q) = (params.p(), params.q());
    let one = Rational::one();
    let bracket_n = pq_int(n, params);
    let bracket_m = pq_int(m, params);
    let x_one_minus_x = RatPoly::from_coeffs(vec![Rational::zero(), one.clone(), -one.clone()]);

    let lhs = image.apply_bivariate(&kernel(m + 1, MomentKind::PQPower, params), &one, &one);

    let inv_p = p.recip();
    let shifted = image.apply_bivariate(&kernel(m, MomentKind::PQPower, params), &inv_p, &inv_p);
    let first = &x_one_minus_x
        * &pq_derivative_poly(&shifted, params).scale(&(p.powu(u64::from(m + n)) / &bracket_n));

    let q_over_p = q / p;
    let lower = image.apply_bivariate(&kernel(m - 1, MomentKind::PQPower, params), &q_over_p, &q_over_p);
    let second = &x_one_minus_x
        * &lower.scale(&(p.powu(u64::from(m + n - 1)) * &bracket_m / &bracket_n));

    let same = image.apply_bivariate(&kernel(m, MomentKind::PQPower, params), &one, &one);
    let coeff = &bracket_m * (p.powu(u64::from(n)) - q.powu(u64::from(n))) / &bracket_n;
    let third = same.shift(1).scale(&coeff);

    Ok(&lhs - &(&(&first + &second) + &third))
}

/// `B((t-x)^m_{p,q}; x) = x(1-x) [n]^{-⌊(m+1)/2⌋} Σ_{k<=m-2} b_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentDecomposition {
    pub m: u32,
    pub n: u32,
    pub exponent: u32,
    pub b: Vec<Rational>,
    pub residual: RatPoly,
}

impl MomentDecomposition {
    /// Rebuilds the moment polynomial from `b`, the exponent and `x(1-x)`.
    pub fn reconstruct(&self, params: &PQParams<Rational>) -> RatPoly {
        let one = Rational::one();
        let x_one_minus_x = RatPoly::from_coeffs(vec![Rational::zero(), one.clone(), -one]);
        let scale = pq_int(self.n, params).powu(u64::from(self.exponent)).recip();
        &(&x_one_minus_x * &RatPoly::from_coeffs(self.b.clone())).scale(&scale) + &self.residual
    }
}

pub fn moment_exponent(m: u32) -> u32 {
    m.div_ceil(2)
}

pub fn lemma3_decompose(n: u32, m: u32, params: &PQParams<Rational>) -> Result<MomentDecomposition> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "decomposition requires m >= 2, got {m}"
        )));
    }
    let moment = central_moment_pq(n, m, params)?.poly;
    let one = Rational::one();
    let x_one_minus_x = RatPoly::from_coeffs(vec![Rational::zero(), one.clone(), -one]);
    let (quot, residual) = moment
        .div_rem(&x_one_minus_x)
        .expect("divisor is nonzero");
    let violation = |reason: String| Error::StructureViolation {
        n,
        m,
        p: params.p().to_string(),
        q: params.q().to_string(),
        reason,
    };
    if !residual.is_zero() {
        return Err(violation(format!("x(1-x) does not divide the moment, remainder {residual}")));
    }
    if quot.degree().is_some_and(|d| d > (m - 2) as usize) {
        return Err(violation(format!(
            "quotient degree {} exceeds m-2 = {}",
            quot.degree().unwrap_or(0),
            m - 2
        )));
    }
    let exponent = moment_exponent(m);
    let scale = pq_int(n, params).powu(u64::from(exponent));
    let mut b: Vec<Rational> = quot.scale(&scale).coeffs().to_vec();
    b.resize((m - 1) as usize, Rational::zero());
    Ok(MomentDecomposition {
        m,
        n,
        exponent,
        b,
        residual,
    })
}

/// Float-mode `b_{k,m,n}`, recovered by interpolating
/// `[n]^e B((t-x)^m_{p,q}; x) / (x(1-x))` at `m-1` interior points.
///
/// Intended for degrees where exact expansion is too costly.
pub fn lemma3_coefficients_float(n: u32, m: u32, params: &PQParams<f64>) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "decomposition requires m >= 2, got {m}"
        )));
    }
    let size = (m - 1) as usize;
    let scale = pq_int(n, params).powi(moment_exponent(m) as i32);
    let mut vandermonde = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    for j in 0..size {
        // Chebyshev points mapped into (0, 1)
        let theta = std::f64::consts::PI * (2 * j + 1) as f64 / (2 * size) as f64;
        let x = 0.5 - 0.4 * theta.cos();
        let mom = central_moment_at(n, m, params, &x, MomentKind::PQPower)?;
        for k in 0..size {
            vandermonde[(j, k)] = x.powi(k as i32);
        }
        rhs[j] = mom * scale / (x * (1.0 - x));
    }
    let b = vandermonde
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidArgument("interpolation system is singular".into()))?;
    Ok(b.iter().copied().collect())
}


/// Grid maxima standing in for the constants `C_m` (signed (p,q)-moment,
/// exponent `⌊(m+1)/2⌋`) and `K_m` (absolute moment, exponent `m/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub m: u32,
    pub n_list: Vec<u32>,
    pub params: Vec<(f64, f64)>,
    pub grid_size: usize,
    pub abs_kind: MomentKind,
    pub c_hat: f64,
    pub k_hat: f64,
}

/// Ratios for one `(n, params)` cell, maximized over the interior grid.
pub fn constant_ratios(m: u32, n: u32, params: &PQParams<f64>, abs_kind: MomentKind) -> Result<(f64, f64)> {
    let ns = nodes(n, params)?.nodes;
    let bracket = pq_int(n, params);
    let c_scale = bracket.powi(moment_exponent(m) as i32);
    let k_scale = bracket.powf(f64::from(m) / 2.0);
    let mut c_hat = 0.0_f64;
    let mut k_hat = 0.0_f64;
    for i in 1..CONSTANT_GRID {
        let x = i as f64 / CONSTANT_GRID as f64;
        let w = basis_weights(n, params, &x)?.w;
        let denom = x * (1.0 - x);
        // The first (p,q)-moment vanishes identically by linear reproduction.
        if m != 1 {
            let signed: f64 = w.iter().zip(&ns).map(|(wk, t)| wk * kernel_at(m, MomentKind::PQPower, params, t, &x)).sum();
            c_hat = c_hat.max(signed.abs() * c_scale / denom);
        }
        let absolute: f64 = w.iter().zip(&ns).map(|(wk, t)| wk * abs_kernel_at(m, abs_kind, params, t, &x)).sum();
        k_hat = k_hat.max(absolute * k_scale / denom);
    }
    Ok((c_hat, k_hat))
}

pub fn estimate_constants(
    m: u32,
    n_list: &[u32],
    param_list: &[PQParams<f64>],
    abs_kind: MomentKind,
) -> Result<ConstantEstimate> {
    if n_list.is_empty() || param_list.is_empty() {
        return Err(Error::InvalidArgument("constant estimation needs nonempty grids".into()));
    }
    let cells: Vec<(u32, &PQParams<f64>)> = n_list
        .iter()
        .flat_map(|&n| param_list.iter().map(move |pq| (n, pq)))
        .collect();
    let ratios = cells
        .par_iter()
        .map(|&(n, pq)| constant_ratios(m, n, pq, abs_kind))
        .collect::<Result<Vec<_>>>()?;
    let (c_hat, k_hat) = ratios
        .iter()
        .fold((0.0_f64, 0.0_f64), |(c, k), &(ci, ki)| (c.max(ci), k.max(ki)));
    Ok(ConstantEstimate {
        m,
        n_list: n_list.to_vec(),
        params: param_list.iter().map(|pq| (*pq.p(), *pq.q())).collect(),
        grid_size: CONSTANT_GRID,
        abs_kind,
        c_hat,
        k_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn half() -> PQParams<Rational> {
        PQParams::from_ratios((1, 1), (1, 2)).unwrap()
    }

    #[test]
    fn low_order_moments() {
        let pq = PQParams::from_ratios((3, 4), (1, 2)).unwrap();
        assert_eq!(central_moment_pq(4, 0, &pq).unwrap().poly, RatPoly::one());
        assert!(central_moment_pq(4, 1, &pq).unwrap().poly.is_zero());
        assert!(central_moment_ordinary(4, 1, &pq).unwrap().poly.is_zero());
    }

    #[test]
    fn second_moment_half() {
        let pq = half();
        let m2 = central_moment_pq(2, 2, &pq).unwrap().poly;
        assert!(m2.eval(&ratio(0, 1)).is_zero());
        assert!(m2.eval(&ratio(1, 1)).is_zero());
        // Σ_k w_k (x_k - x)(x_k - x/2) at x = 1/2 with w = (3/8, 3/8, 1/4),
        // nodes (0, 2/3, 1)
        let x = ratio(1, 2);
        let direct = ratio(3, 8) * (ratio(0, 1) - &x) * (ratio(0, 1) - ratio(1, 4))
            + ratio(3, 8) * (ratio(2, 3) - &x) * (ratio(2, 3) - ratio(1, 4))
            + ratio(1, 4) * (ratio(1, 1) - &x) * (ratio(1, 1) - ratio(1, 4));
        assert_eq!(m2.eval(&x), direct);
        assert_eq!(central_moment_at(2, 2, &pq, &x, MomentKind::PQPower).unwrap(), direct);
    }

    #[test]
    fn ordinary_second_moment_half() {
        let pq = half();
        let x = ratio(1, 2);
        let m2 = central_moment_ordinary(2, 2, &pq).unwrap().poly;
        assert_eq!(m2.eval(&x), ratio(1, 6));
        assert_eq!(central_moment_at(2, 2, &pq, &x, MomentKind::Ordinary).unwrap(), ratio(1, 6));
        assert_eq!(absolute_moment(2, 2, &pq, &x, MomentKind::Ordinary).unwrap(), ratio(1, 6));
    }

    #[test]
    fn absolute_moment_edges() {
        let pq = half();
        assert_eq!(absolute_moment(5, 0, &pq, &ratio(1, 3), MomentKind::Ordinary).unwrap(), ratio(1, 1));
        for m in 1..4 {
            assert!(absolute_moment(5, m, &pq, &ratio(0, 1), MomentKind::Ordinary).unwrap().is_zero());
            assert!(absolute_moment(5, m, &pq, &ratio(0, 1), MomentKind::PQPower).unwrap().is_zero());
        }
    }

    #[test]
    fn recurrence_examples() {
        let cases = [
            (3, 1, PQParams::from_ratios((3, 4), (1, 2)).unwrap()),
            (5, 3, PQParams::from_ratios((1, 1), (2, 3)).unwrap()),
            (8, 5, PQParams::from_ratios((9, 10), (1, 2)).unwrap()),
        ];
        for (n, m, pq) in cases {
            let r = lemma2_residual(n, m, &pq).unwrap();
            assert!(r.is_zero(), "n={n} m={m}: {r}");
        }
        assert!(lemma2_residual(3, 0, &half()).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let pq = half();
        let d2 = lemma3_decompose(6, 2, &pq).unwrap();
        assert_eq!(d2.b.len(), 1);
        assert_eq!(d2.exponent, 1);
        let d3 = lemma3_decompose(4, 3, &pq).unwrap();
        assert!(d3.residual.is_zero());
        assert_eq!(d3.b.len(), 2);
        assert_eq!(d3.reconstruct(&pq), central_moment_pq(4, 3, &pq).unwrap().poly);
        assert!(matches!(lemma3_decompose(4, 1, &pq), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn second_moment_closed_form() {
        // B((t-x)^2_{p,q}; x) at p = 1 reduces to x(1-x)/[n], so b_0 = 1.
        for n in 2..7 {
            let d = lemma3_decompose(n, 2, &half()).unwrap();
            assert_eq!(d.b, vec![ratio(1, 1)]);
        }
    }

    #[test]
    fn float_coefficients_match_exact() {
        let pq = PQParams::from_ratios((9, 10), (2, 3)).unwrap();
        for m in 2..=5 {
            let exact = lemma3_decompose(7, m, &pq).unwrap().b;
            let approx = lemma3_coefficients_float(7, m, &pq.to_float()).unwrap();
            for (e, a) in exact.iter().zip(&approx) {
                assert!((e.to_f64() - a).abs() < 1e-8 * e.to_f64().abs().max(1.0), "m={m}: {e} vs {a}");
            }
        }
    }

    #[test]
    fn constants_first_order_is_zero() {
        let pq = PQParams::new(1.0, 0.9).unwrap();
        let est = estimate_constants(1, &[8, 16], &[pq], MomentKind::PQPower).unwrap();
        assert_eq!(est.c_hat, 0.0);
        assert!(est.k_hat > 0.0);
        assert!(estimate_constants(2, &[], &[], MomentKind::PQPower).is_err());
    }

    #[test]
    fn constants_second_order_matches_symbolic() {
        // At p = 1 the second (p,q)-moment is exactly x(1-x)/[n]: ratio 1.
        let pq = PQParams::new(1.0, 0.95).unwrap();
        let est = estimate_constants(2, &[16, 32], &[pq], MomentKind::PQPower).unwrap();
        assert!((est.c_hat - 1.0).abs() < 1e-9, "{}", est.c_hat);
    }
}
