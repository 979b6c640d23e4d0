//! Built-in target functions.
//!
//! Polynomials are reproduced exactly by low-order operators; `sin` and `exp`
//! are smooth; `abs` and `sqrt-abs` are the rough members with declared
//! Hölder exponents 1 and 1/2.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::operators::{FunctionBundle, ScalarFn};
use crate::poly::RatPoly;
use crate::scalar::ratio;

/// Derivative order available for the smooth members.
pub const SMOOTH_R_MAX: usize = 6;

pub const NAMES: [&str; 8] = ["one", "t", "t2", "t3", "sin", "exp", "abs", "sqrt-abs"];

/// Polynomial members as exact polynomials.
pub fn polynomial(name: &str) -> Option<RatPoly> {
    let monomial = |k| RatPoly::monomial(ratio(1, 1), k);
    match name {
        "one" => Some(RatPoly::one()),
        "t" => Some(monomial(1)),
        "t2" => Some(monomial(2)),
        "t3" => Some(monomial(3)),
        _ => None,
    }
}

/// Members with at least two continuous derivatives.
pub fn is_smooth(name: &str) -> bool {
    !matches!(name, "abs" | "sqrt-abs") && NAMES.contains(&name)
}

pub fn lookup(name: &str) -> Option<FunctionBundle<f64>> {
    if let Some(poly) = polynomial(name) {
        return Some(FunctionBundle::from_poly(name, &poly, SMOOTH_R_MAX).with_lipschitz(1.0, 1.0));
    }
    let bundle = match name {
        "sin" => {
            let derivs = (1..=SMOOTH_R_MAX)
                .map(|k| {
                    let scale = PI.powi(k as i32);
                    let phase = k as f64 * PI / 2.0;
                    Arc::new(move |x: &f64| scale * (PI * x + phase).sin()) as ScalarFn<f64>
                })
                .collect();
            FunctionBundle::new(name, Arc::new(|x: &f64| (PI * x).sin()), derivs)
                .with_lipschitz(PI.powi(SMOOTH_R_MAX as i32 + 1), 1.0)
        }
        "exp" => {
            let derivs = (0..SMOOTH_R_MAX)
                .map(|_| Arc::new(|x: &f64| x.exp()) as ScalarFn<f64>)
                .collect();
            FunctionBundle::new(name, Arc::new(|x: &f64| x.exp()), derivs)
                .with_lipschitz(std::f64::consts::E, 1.0)
        }
        "abs" => FunctionBundle::new(name, Arc::new(|x: &f64| (x - 0.5).abs()), Vec::new())
            .with_lipschitz(1.0, 1.0),
        // |√a - √b| <= √2 · √|a - b| across the kink
        "sqrt-abs" => FunctionBundle::new(name, Arc::new(|x: &f64| (x - 0.5).abs().sqrt()), Vec::new())
            .with_lipschitz(std::f64::consts::SQRT_2, 0.5),
        _ => return None,
    };
    Some(bundle)
}

pub fn all() -> Vec<FunctionBundle<f64>> {
    NAMES.iter().filter_map(|n| lookup(n)).collect()
}
