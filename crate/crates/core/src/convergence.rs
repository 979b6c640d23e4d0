//! Moduli of continuity and the experiments tracking how fast
//! `B^{[r]}_{n,p_n,q_n} f` approaches `f`.
//!
//! All sup-norms are maxima over the grid `x = i/grid_size`, so they are
//! lower bounds of the true norms. Every record carries `[n]_{p_n,q_n}`
//! explicitly: rates are measured against `[n]`, never against `n`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::{central_moment_at, constant_ratios, MomentKind};
use crate::operators::{basis_weights, nodes, taylor_at_node, BasisScalar, FunctionBundle, ScalarFn};
use crate::params::PQParams;
use crate::pq_core::pq_int;

pub const DEFAULT_GRID: usize = 1024;

/// Errors below this are treated as exact zeros by [`fit_rate`].
pub const ZERO_ERROR: f64 = 1e-14;

/// `sup |f(x) - f(y)|` over grid pairs with `|x - y| <= delta`.
pub fn modulus(f: impl Fn(f64) -> f64, delta: f64, grid_size: usize) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidArgument(format!("modulus needs delta > 0, got {delta}")));
    }
    if grid_size < 64 {
        return Err(Error::InvalidArgument(format!("modulus needs grid_size >= 64, got {grid_size}")));
    }
    let values: Vec<f64> = (0..=grid_size).map(|i| f(i as f64 / grid_size as f64)).collect();
    // Grid spacing is 1/grid_size; absorb rounding in delta * grid_size.
    let window = ((delta * grid_size as f64) * (1.0 + 1e-12)).floor() as usize;
    let window = window.min(grid_size);
    let mut best = 0.0_f64;
    for (i, vi) in values.iter().enumerate() {
        for vj in &values[i + 1..(i + window + 1).min(values.len())] {
            best = best.max((vi - vj).abs());
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    FixedPQ,
    OneMinusReciprocal,
    Custom,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::FixedPQ => "fixed",
            Scheme::OneMinusReciprocal => "one-minus-reciprocal",
            Scheme::Custom => "custom",
        })
    }
}

pub type PQGenerator = Arc<dyn Fn(u32) -> (f64, f64) + Send + Sync>;

/// `n ↦ (p_n, q_n)`.
#[derive(Clone)]
pub struct ParamSequence {
    scheme: Scheme,
    generator: PQGenerator,
}

impl fmt::Debug for ParamSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamSequence").field("scheme", &self.scheme).finish()
    }
}

/// Requested parameter scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceSpec {
    Fixed { p: f64, q: f64 },
    OneMinusReciprocal,
}

pub fn make_sequence(spec: SequenceSpec) -> Result<ParamSequence> {
    match spec {
        SequenceSpec::Fixed { p, q } => {
            PQParams::new(p, q)?;
            Ok(ParamSequence {
                scheme: Scheme::FixedPQ,
                generator: Arc::new(move |_| (p, q)),
            })
        }
        SequenceSpec::OneMinusReciprocal => Ok(ParamSequence {
            scheme: Scheme::OneMinusReciprocal,
            generator: Arc::new(|n| {
                let n = f64::from(n);
                (1.0 - 1.0 / (n + 1.0), 1.0 - 1.0 / n)
            }),
        }),
    }
}

impl ParamSequence {
    /// Wraps a caller-supplied generator; its values are validated by [`Self::at`].
    pub fn custom(generator: PQGenerator) -> Self {
        ParamSequence {
            scheme: Scheme::Custom,
            generator,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn at(&self, n: u32) -> Result<PQParams<f64>> {
        let (p, q) = (self.generator)(n);
        PQParams::new(p, q)
    }
}

/// One row of a convergence experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub n: u32,
    pub p_n: f64,
    pub q_n: f64,
    pub bracket_n: f64,
    pub sup_error: f64,
    pub omega: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Pre-tabulated `B^{[r]}` for one `(n, p, q)`: nodes and derivative values
/// at the nodes are computed once, weights per point.
struct HigherOrderEvaluator {
    n: u32,
    params: PQParams<f64>,
    nodes: Vec<f64>,
    taylor: Vec<Vec<f64>>,
}

impl HigherOrderEvaluator {
    fn new(bundle: &FunctionBundle<f64>, r: usize, n: u32, params: PQParams<f64>) -> Result<Self> {
        let nodes = nodes(n, &params)?.nodes;
        let taylor = nodes
            .iter()
            .map(|t| {
                (0..=r)
                    .map(|i| bundle.derivative(i).map(|g| g(t)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HigherOrderEvaluator { n, params, nodes, taylor })
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let w = basis_weights(self.n, &self.params, &x)?.w;
        let mut acc = 0.0;
        for ((wk, t), derivs) in w.iter().zip(&self.nodes).zip(&self.taylor) {
            if *wk == 0.0 {
                continue;
            }
            let d = x - t;
            let (mut power, mut fact, mut inner) = (1.0, 1.0, 0.0);
            for (i, v) in derivs.iter().enumerate() {
                if i > 0 {
                    power *= d;
                    fact *= i as f64;
                }
                inner += v * power / fact;
            }
            acc += wk * inner;
        }
        Ok(acc)
    }
}

fn grid(grid_size: usize) -> impl Iterator<Item = f64> {
    (0..=grid_size).map(move |i| i as f64 / grid_size as f64)
}

/// `sup_x |B^{[r]} f(x) - f(x)|` on the grid.
pub fn sup_error(bundle: &FunctionBundle<f64>, r: usize, n: u32, params: &PQParams<f64>, grid_size: usize) -> Result<f64> {
    check_order(bundle, r)?;
    let eval = HigherOrderEvaluator::new(bundle, r, n, params.clone())?;
    grid(grid_size).try_fold(0.0_f64, |acc, x| Ok(acc.max((eval.eval(x)? - bundle.eval(&x)).abs())))
}

fn check_order<S: crate::scalar::Scalar>(bundle: &FunctionBundle<S>, r: usize) -> Result<()> {
    if r > bundle.r_max() {
        return Err(Error::OrderTooHigh { r, r_max: bundle.r_max() });
    }
    Ok(())
}

fn check_n_list(n_list: &[u32]) -> Result<()> {
    if n_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("n_list must be non-decreasing".into()));
    }
    Ok(())
}

fn ratio_of(sup_error: f64, bound: f64) -> f64 {
    if sup_error < ZERO_ERROR {
        0.0
    } else if bound > 0.0 {
        sup_error / bound
    } else {
        f64::INFINITY
    }
}

/// Tracks `|B^{[r]}f - f| <= D_r [n]^{-r/2} ω(f^(r); [n]^{-1/2})`; the
/// `ratio` column is the empirical `D_r`.
pub fn run_bound_experiment(
    bundle: &FunctionBundle<f64>,
    r: usize,
    seq: &ParamSequence,
    n_list: &[u32],
    grid_size: usize,
) -> Result<Vec<ExperimentRecord>> {
    check_order(bundle, r)?;
    check_n_list(n_list)?;
    let top = bundle.derivative(r)?.clone();
    n_list
        .par_iter()
        .map(|&n| {
            let params = seq.at(n)?;
            let bracket = pq_int(n, &params);
            let sup = sup_error(bundle, r, n, &params, grid_size)?;
            let omega = modulus(|x| top(&x), bracket.powf(-0.5), grid_size)?;
            let bound = bracket.powf(-(r as f64) / 2.0) * omega;
            Ok(ExperimentRecord {
                n,
                p_n: *params.p(),
                q_n: *params.q(),
                bracket_n: bracket,
                sup_error: sup,
                omega,
                bound,
                ratio: ratio_of(sup, bound),
            })
        })
        .collect()
}

/// Does a run show `sup_error → 0`? Used to keep fixed-parameter runs, where
/// `[n]` stays bounded, from being reported as convergent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceAssessment {
    /// `[n]` at the last record over `[n]` at the first.
    pub bracket_growth: f64,
    /// First sup-error over last sup-error.
    pub error_reduction: f64,
    pub converging: bool,
}

pub fn assess_convergence(records: &[ExperimentRecord]) -> Option<ConvergenceAssessment> {
    let (first, last) = (records.first()?, records.last()?);
    let bracket_growth = last.bracket_n / first.bracket_n;
    let exact = records.iter().all(|r| r.sup_error < 1e-12);
    let error_reduction = if exact { f64::INFINITY } else { first.sup_error / last.sup_error };
    Some(ConvergenceAssessment {
        bracket_growth,
        error_reduction,
        converging: exact || (bracket_growth >= 2.0 && error_reduction >= 2.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares of `ln sup_error` on `ln [n]`.
pub fn fit_rate(records: &[ExperimentRecord]) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.sup_error >= ZERO_ERROR)
        .map(|r| (r.bracket_n.ln(), r.sup_error.ln()))
        .collect();
    if points.len() < 4 {
        return Err(Error::DegenerateFit(points.len()));
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit(points.len()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept: mean_y - slope * mean_x,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronovskajaRow {
    pub n: u32,
    pub p_n: f64,
    pub q_n: f64,
    pub bracket_n: f64,
    /// `sup_x |[n](B_n f - f)(x) - x(1-x) f''(x)/2|`
    pub deviation: f64,
    /// Same, against `p_n^{n-1} x(1-x) f''(x)/2`, the exact leading term
    /// `[n] B((t-x)^2; x) f''(x)/2`.
    pub scaled_deviation: f64,
}

pub fn voronovskaja_table(
    bundle: &FunctionBundle<f64>,
    seq: &ParamSequence,
    n_list: &[u32],
    grid_size: usize,
) -> Result<Vec<VoronovskajaRow>> {
    check_order(bundle, 2)?;
    check_n_list(n_list)?;
    let second = bundle.derivative(2)?.clone();
    n_list
        .par_iter()
        .map(|&n| {
            let params = seq.at(n)?;
            let bracket = pq_int(n, &params);
            let lead = params.p().powi(n as i32 - 1);
            let eval = HigherOrderEvaluator::new(bundle, 0, n, params.clone())?;
            let (mut deviation, mut scaled) = (0.0_f64, 0.0_f64);
            for x in grid(grid_size) {
                let scaled_gap = bracket * (eval.eval(x)? - bundle.eval(&x));
                let target = x * (1.0 - x) * second(&x) / 2.0;
                deviation = deviation.max((scaled_gap - target).abs());
                scaled = scaled.max((scaled_gap - lead * target).abs());
            }
            Ok(VoronovskajaRow {
                n,
                p_n: *params.p(),
                q_n: *params.q(),
                bracket_n: bracket,
                deviation,
                scaled_deviation: scaled,
            })
        })
        .collect()
}

/// The quantity bounded in the second-order error estimate:
///
/// ```text
/// B^{[r]}f(x) - f(x) - (-1)^r f^(r+1)(x) B((t-x)^{r+1}; x)/(r+1)!
///                    - (-1)^r f^(r+2)(x) B((t-x)^{r+2}; x)/(r+2)!
/// ```
pub fn theorem10_residual<S: BasisScalar>(
    bundle: &FunctionBundle<S>,
    r: usize,
    n: u32,
    params: &PQParams<S>,
    x: &S,
) -> Result<S> {
    check_order(bundle, r + 2)?;
    let derivs: Vec<&ScalarFn<S>> = (0..=r).map(|i| bundle.derivative(i)).collect::<Result<_>>()?;
    let w = basis_weights(n, params, x)?.w;
    let ns = nodes(n, params)?.nodes;
    let higher = w
        .iter()
        .zip(&ns)
        .filter(|(wk, _)| !wk.is_zero())
        .fold(S::zero(), |acc, (wk, t)| acc + wk.clone() * taylor_at_node(&derivs, t, x));
    let sign = if r.is_multiple_of(2) { S::one() } else { -S::one() };
    let mut out = higher - bundle.eval(x);
    for j in [r + 1, r + 2] {
        let fact = (1..=j as u64).fold(S::one(), |acc, i| acc * S::from_u64(i));
        let moment = central_moment_at(n, j as u32, params, x, MomentKind::Ordinary)?;
        out = out - sign.clone() * (bundle.derivative(j)?)(x) * moment / fact;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem10Check {
    pub lhs_sup: f64,
    pub rhs_bound: f64,
    pub ratio: f64,
    pub k_r2: f64,
    pub k_r4: f64,
}

/// Grid sup of [`theorem10_residual`] against
/// `(K_{r+2} + K_{r+4}) x(1-x) [n]^{-r/2-1} Σ_i ω(f^(r+2-i); [n]^{-1/2}) / (i!(r+2-i)!)`
/// with `x(1-x)` replaced by its maximum `1/4` and the `K` taken as grid
/// maxima of ordinary absolute moments at this `(n, p, q)`.
pub fn theorem10_check(
    bundle: &FunctionBundle<f64>,
    r: usize,
    params: &PQParams<f64>,
    n: u32,
    grid_size: usize,
) -> Result<Theorem10Check> {
    check_order(bundle, r + 2)?;
    let lhs_sup = grid(grid_size)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| theorem10_residual(bundle, r, n, params, x).map(f64::abs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0_f64, f64::max);
    let bracket = pq_int(n, params);
    let (_, k_r2) = constant_ratios(r as u32 + 2, n, params, MomentKind::Ordinary)?;
    let (_, k_r4) = constant_ratios(r as u32 + 4, n, params, MomentKind::Ordinary)?;
    let delta = bracket.powf(-0.5);
    let mut omega_sum = 0.0;
    for i in 0..=r {
        let order = r + 2 - i;
        let g = bundle.derivative(order)?.clone();
        let fact = factorial(i) * factorial(order);
        omega_sum += modulus(|x| g(&x), delta, grid_size)? / fact;
    }
    let rhs_bound = (k_r2 + k_r4) * 0.25 * bracket.powf(-(r as f64) / 2.0 - 1.0) * omega_sum;
    Ok(Theorem10Check {
        lhs_sup,
        rhs_bound,
        ratio: ratio_of(lhs_sup, rhs_bound),
        k_r2,
        k_r4,
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn modulus_examples() {
        assert_eq!(modulus(|_| 3.0, 0.25, 1024).unwrap(), 0.0);
        assert!((modulus(|x| x, 0.25, 1024).unwrap() - 0.25).abs() < 1e-12);
        let kink = modulus(|x| (x - 0.5).abs(), 0.125, 1024).unwrap();
        assert!((kink - 0.125).abs() <= 1.0 / 1024.0);
        assert!(modulus(|x| x, 0.0, 1024).is_err());
        assert!(modulus(|x| x, 0.1, 32).is_err());
    }

    #[test]
    fn sequences() {
        let omr = make_sequence(SequenceSpec::OneMinusReciprocal).unwrap();
        let pq = omr.at(2).unwrap();
        assert!((pq.p() - 2.0 / 3.0).abs() < 1e-15 && (pq.q() - 0.5).abs() < 1e-15);
        assert!(omr.at(1).is_err());
        assert!(pq_int(10, &omr.at(10).unwrap()) > pq_int(5, &omr.at(5).unwrap()));
        let fixed = make_sequence(SequenceSpec::Fixed { p: 1.0, q: 0.9 }).unwrap();
        assert_eq!(fixed.at(77).unwrap(), PQParams::new(1.0, 0.9).unwrap());
        assert!(make_sequence(SequenceSpec::Fixed { p: 0.8, q: 0.9 }).is_err());
        let bad = ParamSequence::custom(Arc::new(|n| (0.5, 0.5 + 1.0 / f64::from(n))));
        assert!(bad.at(4).is_err());
        assert_eq!(bad.scheme(), Scheme::Custom);
    }

    #[test]
    fn reproduced_functions_have_zero_ratio() {
        let seq = make_sequence(SequenceSpec::OneMinusReciprocal).unwrap();
        let t = corpus::lookup("t").unwrap();
        for rec in run_bound_experiment(&t, 0, &seq, &[8, 16], 256).unwrap() {
            assert!(rec.sup_error < 1e-12 && rec.ratio == 0.0);
        }
        let t2 = corpus::lookup("t2").unwrap();
        let recs = run_bound_experiment(&t2, 2, &seq, &[8, 16, 32, 64], 256).unwrap();
        for rec in &recs {
            assert!(rec.sup_error < 1e-12 && rec.ratio == 0.0, "{rec:?}");
            assert_eq!(rec.ratio, 0.0);
        }
        assert_eq!(fit_rate(&recs), Err(Error::DegenerateFit(0)));
    }

    #[test]
    fn records_are_ordered_by_n() {
        let seq = make_sequence(SequenceSpec::OneMinusReciprocal).unwrap();
        let recs = run_bound_experiment(&corpus::lookup("sin").unwrap(), 1, &seq, &[8, 16, 32], 128).unwrap();
        assert_eq!(recs.iter().map(|r| r.n).collect::<Vec<_>>(), vec![8, 16, 32]);
        assert!(run_bound_experiment(&corpus::lookup("sin").unwrap(), 1, &seq, &[16, 8], 128).is_err());
        assert!(run_bound_experiment(&corpus::lookup("abs").unwrap(), 1, &seq, &[16], 128).is_err());
    }

    #[test]
    fn voronovskaja_rejects_rough_bundle() {
        let seq = make_sequence(SequenceSpec::OneMinusReciprocal).unwrap();
        assert!(voronovskaja_table(&corpus::lookup("abs").unwrap(), &seq, &[16], 128).is_err());
        let rows = voronovskaja_table(&corpus::lookup("t").unwrap(), &seq, &[16, 32], 128).unwrap();
        assert!(rows.iter().all(|r| r.deviation < 1e-10));
    }

    #[test]
    fn theorem10_polynomial_lhs_vanishes() {
        let pq = PQParams::new(0.95, 0.9).unwrap();
        let t2 = corpus::lookup("t2").unwrap();
        let check = theorem10_check(&t2, 2, &pq, 12, 128).unwrap();
        assert!(check.lhs_sup < 1e-12, "{check:?}");
    }
}
