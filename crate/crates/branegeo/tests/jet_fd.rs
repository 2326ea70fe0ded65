//! Jet derivatives against Richardson-extrapolated finite differences.
//!
//! The jets are exact, so the only error in these comparisons is the
//! truncation/roundoff of the finite-difference oracle; tolerances are set
//! accordingly.

use branegeo::dsl::{eval_f64, eval_jet, parse, Expr};
use branegeo::jet::Jet;
use proptest::prelude::*;

/// Richardson-extrapolated central difference for ∂f/∂x_i.
fn fd1(e: &Expr, u: &[f64], i: usize, h: f64) -> f64 {
    let mut up = u.to_vec();
    let mut um = u.to_vec();
    let d = |h: f64, up: &mut [f64], um: &mut [f64]| {
        up[i] = u[i] + h;
        um[i] = u[i] - h;
        (eval_f64(e, up) - eval_f64(e, um)) / (2.0 * h)
    };
    let d1 = d(h, &mut up, &mut um);
    let d2 = d(h / 2.0, &mut up, &mut um);
    (4.0 * d2 - d1) / 3.0
}

/// Central second difference ∂²f/∂x_i∂x_j.
fn fd2(e: &Expr, u: &[f64], i: usize, j: usize, h: f64) -> f64 {
    let at = |di: f64, dj: f64| {
        let mut v = u.to_vec();
        v[i] += di;
        v[j] += dj;
        eval_f64(e, &v)
    };
    if i == j {
        (at(h, 0.0) - 2.0 * at(0.0, 0.0) + at(-h, 0.0)) / (h * h)
    } else {
        (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h)
    }
}

fn exprs() -> Vec<Expr> {
    let params = ["u".to_string(), "v".to_string()];
    [
        "sin(u)*cos(v) + u^2*v",
        "exp(u/2)*tanh(v) - sqrt(u + 2)",
        "(2 + cos(v))*cos(u)",
        "log(u + 3) / (1 + v^2)",
        "sinh(u)*v^3 - tan(v/4)",
    ]
    .iter()
    .map(|s| parse(s, &params).unwrap())
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jet_gradient_matches_finite_differences(
        x in 0.2f64..1.4,
        y in -1.2f64..1.2,
        which in 0usize..5,
    ) {
        let e = &exprs()[which];
        let u = [x, y];
        let vars: Vec<Jet> = (0..2).map(|i| Jet::variable(u[i], i, 2, 3)).collect();
        let jet = eval_jet(e, &vars).unwrap();
        for i in 0..2 {
            let exact = jet.clone().partial(i).value();
            let approx = fd1(e, &u, i, 1e-4);
            prop_assert!(
                (exact - approx).abs() <= 1e-7 * (1.0 + exact.abs()),
                "d/du{}: jet {} vs fd {}", i, exact, approx
            );
        }
    }

    #[test]
    fn jet_hessian_matches_finite_differences(
        x in 0.2f64..1.4,
        y in -1.2f64..1.2,
        which in 0usize..5,
    ) {
        let e = &exprs()[which];
        let u = [x, y];
        let vars: Vec<Jet> = (0..2).map(|i| Jet::variable(u[i], i, 2, 3)).collect();
        let jet = eval_jet(e, &vars).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let exact = jet.clone().partial(i).partial(j).value();
                let approx = fd2(e, &u, i, j, 1e-4);
                prop_assert!(
                    (exact - approx).abs() <= 1e-5 * (1.0 + exact.abs()),
                    "d2/du{}du{}: jet {} vs fd {}", i, j, exact, approx
                );
            }
        }
    }
}

#[test]
fn third_derivatives_match_on_a_fixed_case() {
    let params = ["u".to_string(), "v".to_string()];
    let e = parse("sin(u)*exp(v)", &params).unwrap();
    let u = [0.7, 0.3];
    let vars: Vec<Jet> = (0..2).map(|i| Jet::variable(u[i], i, 2, 3)).collect();
    let jet = eval_jet(&e, &vars).unwrap();
    // d3/du3 = -cos(u)exp(v); d3/du2dv = -sin(u)exp(v); d3/dudv2 = cos(u)exp(v)
    let c = u[0].cos() * u[1].exp();
    let s = u[0].sin() * u[1].exp();
    let d3 = |a: usize, b: usize, cc: usize| jet.clone().partial(a).partial(b).partial(cc).value();
    assert!((d3(0, 0, 0) + c).abs() < 1e-12);
    assert!((d3(0, 0, 1) + s).abs() < 1e-12);
    assert!((d3(0, 1, 1) - c).abs() < 1e-12);
    assert!((d3(1, 1, 1) - s).abs() < 1e-12);
}
