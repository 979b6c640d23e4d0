mod common;

use common::{binomial, bracket, exact_grid};
use num_traits::{One, Zero};
use pqapprox_core::pq_core::{
    pq_binomial, pq_derivative_poly, pq_factorial, pq_int, pq_power_rising,
};
use pqapprox_core::{ratio, PQParams, RatPoly, Rational, Scalar};
use proptest::prelude::*;

fn rational_params() -> impl Strategy<Value = PQParams<Rational>> {
    (1i64..=40, 1i64..=40, 1i64..=40, 2i64..=40).prop_filter_map("p in (0,1]", |(a, d, c, f)| {
        if a > d || c >= f {
            return None;
        }
        // q = p * c/f < p
        let p = ratio(a, d);
        let q = &p * ratio(c, f);
        PQParams::new(p, q).ok()
    })
}

fn rat_poly(max_degree: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec((-20i64..=20, 1i64..=9), 0..=max_degree + 1)
        .prop_map(|cs| RatPoly::from_ratios(&cs))
}

proptest! {
    #[test]
    fn bracket_times_difference(pq in rational_params(), n in 0u32..=30) {
        let (p, q) = (pq.p(), pq.q());
        prop_assert_eq!(
            pq_int(n, &pq) * (p - q),
            p.powu(u64::from(n)) - q.powu(u64::from(n))
        );
    }

    #[test]
    fn float_agrees_with_rational(pq in rational_params(), n in 0u32..=30) {
        let exact = pq_int(n, &pq).to_f64();
        let float = pq_int(n, &pq.to_float());
        prop_assert!((exact - float).abs() <= 1e-12 * exact.abs().max(f64::MIN_POSITIVE));
        let exact = pq_factorial(n.min(12), &pq).to_f64();
        let float = pq_factorial(n.min(12), &pq.to_float());
        prop_assert!((exact - float).abs() <= 1e-12 * exact.abs());
    }

    #[test]
    fn product_rules(pq in rational_params(), f in rat_poly(6), g in rat_poly(6)) {
        let (p, q) = (pq.p(), pq.q());
        let d = |h: &RatPoly| pq_derivative_poly(h, &pq);
        let fg = &f * &g;
        // D(fg)(x) = f(px) Dg(x) + Df(x) g(qx)
        let rule5 = &(&f.compose_scale(p) * &d(&g)) + &(&d(&f) * &g.compose_scale(q));
        // D(fg)(x) = f(qx) Dg(x) + Df(x) g(px)
        let rule6 = &(&f.compose_scale(q) * &d(&g)) + &(&d(&f) * &g.compose_scale(p));
        prop_assert_eq!(&d(&fg), &rule5);
        prop_assert_eq!(&d(&fg), &rule6);
    }

    #[test]
    fn derivative_matches_divided_difference(pq in rational_params(), f in rat_poly(6), xn in 1i64..50) {
        let x = ratio(xn, 17);
        let numeric = pqapprox_core::pq_core::pq_derivative_numeric(|t: &Rational| f.eval(t), &x, &pq).unwrap();
        prop_assert_eq!(numeric, pq_derivative_poly(&f, &pq).eval(&x));
    }
}

#[test]
fn binomial_recurrence_matches_factorial_quotient() {
    for pq in exact_grid() {
        for n in 0..=15 {
            for k in 0..=n {
                assert_eq!(pq_binomial(n, k, &pq).unwrap(), binomial(n, k, &pq), "n={n} k={k} {pq}");
            }
        }
    }
}

#[test]
fn p_one_gives_q_integers() {
    for (a, b) in [(1, 2), (2, 3), (9, 10), (49, 50)] {
        let pq = PQParams::from_ratios((1, 1), (a, b)).unwrap();
        let q = pq.q();
        for n in 0..=30u32 {
            let q_int = (Rational::one() - q.powu(u64::from(n))) / (Rational::one() - q);
            assert_eq!(pq_int(n, &pq), q_int);
            assert_eq!(pq_int(n, &pq), bracket(n, &pq));
        }
    }
}

#[test]
fn rising_power_derivative_identity() {
    let one = Rational::one();
    for pq in exact_grid() {
        let (p, q) = (pq.p(), pq.q());
        for n in 1..=12u32 {
            let lhs = pq_derivative_poly(&pq_power_rising(&one, n, &pq), &pq);
            let rhs = pq_power_rising(&one, n - 1, &pq)
                .compose_scale(q)
                .scale(&pq_int(n, &pq));
            assert_eq!(lhs, rhs, "n={n} {pq}");

            // (1+px)^n = p^{n-1}(1+px)(1+qx)^{n-1}
            let one_plus_px = RatPoly::from_coeffs(vec![one.clone(), p.clone()]);
            let lhs = pq_power_rising(&one, n, &pq).compose_scale(p);
            let rhs = (&one_plus_px * &pq_power_rising(&one, n - 1, &pq).compose_scale(q))
                .scale(&p.powu(u64::from(n - 1)));
            assert_eq!(lhs, rhs, "n={n} {pq}");

            // (1+qx)^n = (p^{n-1} + q^n x)(1+qx)^{n-1}
            let lead = RatPoly::from_coeffs(vec![p.powu(u64::from(n - 1)), q.powu(u64::from(n))]);
            let lhs = pq_power_rising(&one, n, &pq).compose_scale(q);
            let rhs = &lead * &pq_power_rising(&one, n - 1, &pq).compose_scale(q);
            assert_eq!(lhs, rhs, "n={n} {pq}");
        }
    }
}

#[test]
fn rising_power_has_full_degree() {
    for pq in exact_grid() {
        for n in 0..=8u32 {
            let poly = pq_power_rising(&ratio(2, 3), n, &pq);
            assert_eq!(poly.degree(), Some(n as usize));
            assert!(!poly.coeff(n as usize).is_zero());
        }
    }
}
