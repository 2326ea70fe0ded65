//! Independent classical oracle for curvature quantities.
//!
//! This module never touches the jet pipeline. Embedding expressions are
//! differentiated *symbolically* on the DSL syntax tree, and the induced
//! metric, Christoffel symbols, Riemann/Ricci tensors and scalar curvature
//! are assembled from the textbook coordinate formulas. Derivatives of the
//! inverse metric use ∂g⁻¹ = −g⁻¹(∂g)g⁻¹, so every quantity is fully
//! analytic (no finite differencing anywhere).

use crate::chart::{Chart, VectorField};
use crate::dsl::{eval_f64, Expr, Func};

// ---------------------------------------------------------------------------
// Symbolic differentiation

fn num(n: f64) -> Expr {
    Expr::Num(n)
}

fn is_const(e: &Expr, n: f64) -> bool {
    matches!(e, Expr::Num(v) if *v == n)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        return num(x + y);
    }
    Expr::Add(Box::new(a), Box::new(b))
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_const(&b, 0.0) {
        return a;
    }
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        return num(x - y);
    }
    if is_const(&a, 0.0) {
        return Expr::Neg(Box::new(b));
    }
    Expr::Sub(Box::new(a), Box::new(b))
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return num(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        return num(x * y);
    }
    Expr::Mul(Box::new(a), Box::new(b))
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return num(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn fun(f: Func, a: Expr) -> Expr {
    Expr::Fun(f, Box::new(a))
}

/// Exact symbolic partial derivative ∂e/∂u_v on the DSL syntax tree.
pub fn diff(e: &Expr, v: usize) -> Expr {
    match e {
        Expr::Num(_) => num(0.0),
        Expr::Var(i) => num(if *i == v { 1.0 } else { 0.0 }),
        Expr::Neg(a) => {
            let da = diff(a, v);
            if is_const(&da, 0.0) {
                num(0.0)
            } else {
                Expr::Neg(Box::new(da))
            }
        }
        Expr::Add(a, b) => add(diff(a, v), diff(b, v)),
        Expr::Sub(a, b) => sub(diff(a, v), diff(b, v)),
        Expr::Mul(a, b) => add(
            mul(diff(a, v), (**b).clone()),
            mul((**a).clone(), diff(b, v)),
        ),
        Expr::Div(a, b) => {
            // (a/b)' = a'/b - a b'/b^2
            let da = div(diff(a, v), (**b).clone());
            let db = diff(b, v);
            if is_const(&db, 0.0) {
                da
            } else {
                sub(
                    da,
                    div(
                        mul((**a).clone(), db),
                        Expr::Pow(Box::new((**b).clone()), 2.0),
                    ),
                )
            }
        }
        Expr::Pow(a, p) => {
            // (a^p)' = p a^(p-1) a'
            let da = diff(a, v);
            if is_const(&da, 0.0) || *p == 0.0 {
                return num(0.0);
            }
            let deriv = mul(num(*p), Expr::Pow(Box::new((**a).clone()), p - 1.0));
            mul(deriv, da)
        }
        Expr::Fun(f, a) => {
            let da = diff(a, v);
            if is_const(&da, 0.0) {
                return num(0.0);
            }
            let inner = (**a).clone();
            let outer = match f {
                Func::Neg => Expr::Neg(Box::new(num(1.0))),
                Func::Sin => fun(Func::Cos, inner),
                Func::Cos => Expr::Neg(Box::new(fun(Func::Sin, inner))),
                Func::Tan => {
                    // 1/cos^2
                    div(num(1.0), Expr::Pow(Box::new(fun(Func::Cos, inner)), 2.0))
                }
                Func::Sinh => fun(Func::Cosh, inner),
                Func::Cosh => fun(Func::Sinh, inner),
                Func::Tanh => div(num(1.0), Expr::Pow(Box::new(fun(Func::Cosh, inner)), 2.0)),
                Func::Exp => fun(Func::Exp, inner),
                Func::Log => div(num(1.0), inner),
                Func::Sqrt => div(num(0.5), fun(Func::Sqrt, inner)),
            };
            if let Func::Neg = f {
                if is_const(&da, 1.0) {
                    return Expr::Neg(Box::new(num(1.0)));
                }
                return Expr::Neg(Box::new(da));
            }
            mul(outer, da)
        }
    }
}

// ---------------------------------------------------------------------------
// Classical coordinate oracle

/// Analytic oracle built from symbolic derivatives of a chart's embedding.
pub struct ClassicalOracle {
    m: usize,
    eta: Vec<f64>,
    /// First, second and third symbolic derivatives of each ambient
    /// coordinate: dx[r][i], ddx[r][i][j], dddx[r][i][j][k].
    dx: Vec<Vec<Expr>>,
    ddx: Vec<Vec<Vec<Expr>>>,
    dddx: Vec<Vec<Vec<Vec<Expr>>>>,
}

fn invert(g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = g.len();
    let mut a: Vec<Vec<f64>> = g
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for row in 0..m {
            if row != col && a[row][col] != 0.0 {
                let f = a[row][col];
                for k in 0..2 * m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    a.into_iter().map(|row| row[m..].to_vec()).collect()
}

impl ClassicalOracle {
    pub fn new(chart: &Chart) -> Self {
        let m = chart.m();
        let n = chart.embedding.len();
        let eta = (0..n).map(|r| chart.sig.eta(r)).collect();
        let dx: Vec<Vec<Expr>> = chart
            .embedding
            .iter()
            .map(|x| (0..m).map(|i| diff(x, i)).collect())
            .collect();
        let ddx: Vec<Vec<Vec<Expr>>> = dx
            .iter()
            .map(|row| {
                row.iter()
                    .map(|xi| (0..m).map(|j| diff(xi, j)).collect())
                    .collect()
            })
            .collect();
        let dddx: Vec<Vec<Vec<Vec<Expr>>>> = ddx
            .iter()
            .map(|row| {
                row.iter()
                    .map(|xij: &Vec<Expr>| {
                        xij.iter()
                            .map(|e| (0..m).map(|k| diff(e, k)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ClassicalOracle {
            m,
            eta,
            dx,
            ddx,
            dddx,
        }
    }

    fn dx_at(&self, u: &[f64]) -> Vec<Vec<f64>> {
        self.dx
            .iter()
            .map(|row| row.iter().map(|e| eval_f64(e, u)).collect())
            .collect()
    }

    fn ddx_at(&self, u: &[f64]) -> Vec<Vec<Vec<f64>>> {
        self.ddx
            .iter()
            .map(|row| {
                row.iter()
                    .map(|r2| r2.iter().map(|e| eval_f64(e, u)).collect())
                    .collect()
            })
            .collect()
    }

    fn dddx_at(&self, u: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
        self.dddx
            .iter()
            .map(|row| {
                row.iter()
                    .map(|r2: &Vec<Vec<Expr>>| {
                        r2.iter()
                            .map(|r3| r3.iter().map(|e| eval_f64(e, u)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Induced metric g_ij = Σ_r η_r (∂_i x^r)(∂_j x^r).
    pub fn metric(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let dx = self.dx_at(u);
        let mut g = vec![vec![0.0; self.m]; self.m];
        for i in 0..self.m {
            for j in 0..self.m {
                g[i][j] = (0..dx.len()).map(|r| self.eta[r] * dx[r][i] * dx[r][j]).sum();
            }
        }
        g
    }

    pub fn metric_inv(&self, u: &[f64]) -> Vec<Vec<f64>> {
        invert(&self.metric(u))
    }

    /// ∂_k g_ij from second embedding derivatives, indexed [k][i][j].
    fn metric_deriv(&self, u: &[f64]) -> Vec<Vec<Vec<f64>>> {
        let dx = self.dx_at(u);
        let ddx = self.ddx_at(u);
        let m = self.m;
        let mut dg = vec![vec![vec![0.0; m]; m]; m];
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    dg[k][i][j] = (0..dx.len())
                        .map(|r| self.eta[r] * (ddx[r][i][k] * dx[r][j] + dx[r][i] * ddx[r][j][k]))
                        .sum();
                }
            }
        }
        dg
    }

    /// ∂_l ∂_k g_ij from third embedding derivatives, indexed [l][k][i][j].
    fn metric_deriv2(&self, u: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
        let dx = self.dx_at(u);
        let ddx = self.ddx_at(u);
        let dddx = self.dddx_at(u);
        let m = self.m;
        let mut ddg = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        for l in 0..m {
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        ddg[l][k][i][j] = (0..dx.len())
                            .map(|r| {
                                self.eta[r]
                                    * (dddx[r][i][k][l] * dx[r][j]
                                        + ddx[r][i][k] * ddx[r][j][l]
                                        + ddx[r][i][l] * ddx[r][j][k]
                                        + dx[r][i] * dddx[r][j][k][l])
                            })
                            .sum();
                    }
                }
            }
        }
        ddg
    }

    /// Christoffel symbols Γ^k_ij, indexed [k][i][j].
    pub fn christoffel(&self, u: &[f64]) -> Vec<Vec<Vec<f64>>> {
        let m = self.m;
        let ginv = self.metric_inv(u);
        let dg = self.metric_deriv(u);
        let mut gamma = vec![vec![vec![0.0; m]; m]; m];
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut s = 0.0;
                    for l in 0..m {
                        s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    }
                    gamma[k][i][j] = 0.5 * s;
                }
            }
        }
        gamma
    }

    /// ∂_p Γ^k_ij, indexed [p][k][i][j]; uses ∂g⁻¹ = −g⁻¹(∂g)g⁻¹.
    fn christoffel_deriv(&self, u: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
        let m = self.m;
        let ginv = self.metric_inv(u);
        let dg = self.metric_deriv(u);
        let ddg = self.metric_deriv2(u);
        // dginv[p][k][l] = -Σ_{a,b} ginv[k][a] dg[p][a][b] ginv[b][l]
        let mut dginv = vec![vec![vec![0.0; m]; m]; m];
        for p in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut s = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            s += ginv[k][a] * dg[p][a][b] * ginv[b][l];
                        }
                    }
                    dginv[p][k][l] = -s;
                }
            }
        }
        let mut dgamma = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        for p in 0..m {
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        let mut s = 0.0;
                        for l in 0..m {
                            s += dginv[p][k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                                + ginv[k][l]
                                    * (ddg[p][i][j][l] + ddg[p][j][i][l] - ddg[p][l][i][j]);
                        }
                        dgamma[p][k][i][j] = 0.5 * s;
                    }
                }
            }
        }
        dgamma
    }

    /// Riemann tensor R^l_{s,ij} = ∂_i Γ^l_js − ∂_j Γ^l_is
    /// + Γ^l_ik Γ^k_js − Γ^l_jk Γ^k_is, indexed [l][s][i][j].
    pub fn riemann(&self, u: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
        let m = self.m;
        let gamma = self.christoffel(u);
        let dgamma = self.christoffel_deriv(u);
        let mut riem = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        for l in 0..m {
            for s in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        let mut v = dgamma[i][l][j][s] - dgamma[j][l][i][s];
                        for k in 0..m {
                            v += gamma[l][i][k] * gamma[k][j][s] - gamma[l][j][k] * gamma[k][i][s];
                        }
                        riem[l][s][i][j] = v;
                    }
                }
            }
        }
        riem
    }

    /// Ricci tensor R_sj = R^i_{s,ij}.
    pub fn ricci(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let m = self.m;
        let riem = self.riemann(u);
        let mut ric = vec![vec![0.0; m]; m];
        for s in 0..m {
            for j in 0..m {
                ric[s][j] = (0..m).map(|i| riem[i][s][i][j]).sum();
            }
        }
        ric
    }

    /// Scalar curvature R = g^{sj} R_sj (classical sign: +2/r² on a sphere
    /// of radius r).
    pub fn scalar(&self, u: &[f64]) -> f64 {
        let ginv = self.metric_inv(u);
        let ric = self.ricci(u);
        let m = self.m;
        let mut r = 0.0;
        for s in 0..m {
            for j in 0..m {
                r += ginv[s][j] * ric[s][j];
            }
        }
        r
    }

    /// Gauss curvature of a 2-brane: K = R/2.
    pub fn gauss_curvature(&self, u: &[f64]) -> f64 {
        assert_eq!(self.m, 2, "Gauss curvature is only defined for 2-branes");
        self.scalar(u) / 2.0
    }

    /// Frobenius norm of the Killing residual ∇_i ξ_j + ∇_j ξ_i for a
    /// chart-component field ξ^k, with ξ_j = g_jk ξ^k.
    pub fn killing_residual(&self, chart: &Chart, field: &VectorField, u: &[f64]) -> f64 {
        let m = self.m;
        assert_eq!(field.components.len(), m);
        let _ = chart;
        let g = self.metric(u);
        let dg = self.metric_deriv(u);
        let gamma = self.christoffel(u);
        let xi: Vec<f64> = field.components.iter().map(|e| eval_f64(e, u)).collect();
        let dxi: Vec<Vec<f64>> = field
            .components
            .iter()
            .map(|e| (0..m).map(|i| eval_f64(&diff(e, i), u)).collect())
            .collect();
        // Lowered components and their partials.
        let lower = |j: usize| -> f64 { (0..m).map(|k| g[j][k] * xi[k]).sum() };
        let dlower = |i: usize, j: usize| -> f64 {
            (0..m)
                .map(|k| dg[i][j][k] * xi[k] + g[j][k] * dxi[k][i])
                .sum()
        };
        let mut norm = 0.0;
        for i in 0..m {
            for j in 0..m {
                let mut cov_ij = dlower(i, j);
                let mut cov_ji = dlower(j, i);
                for k in 0..m {
                    cov_ij -= gamma[k][i][j] * lower(k);
                    cov_ji -= gamma[k][j][i] * lower(k);
                }
                let s = cov_ij + cov_ji;
                norm += s * s;
            }
        }
        norm.sqrt()
    }
}

// ---------------------------------------------------------------------------
// Closed forms

/// Scalar curvature of a round sphere of radius r: R = 2/r².
pub fn sphere_scalar_closed_form(r: f64) -> f64 {
    2.0 / (r * r)
}

/// Gauss curvature of the torus of revolution at poloidal angle ϑ:
/// K = cos ϑ / (r (R + r cos ϑ)).
pub fn torus_gauss_closed_form(major: f64, minor: f64, theta: f64) -> f64 {
    theta.cos() / (minor * (major + minor * theta.cos()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_chart, BuiltinParams};
    use crate::dsl::parse;

    fn expr(src: &str) -> Expr {
        parse(src, &["u".into(), "v".into()]).unwrap()
    }

    #[test]
    fn symbolic_diff_matches_hand_values() {
        let e = expr("sin(u)*exp(v) + u^3/v");
        let du = diff(&e, 0);
        let dv = diff(&e, 1);
        let u = 0.7_f64;
        let v = 1.3_f64;
        let expect_du = u.cos() * v.exp() + 3.0 * u * u / v;
        let expect_dv = u.sin() * v.exp() - u.powi(3) / (v * v);
        assert!((eval_f64(&du, &[u, v]) - expect_du).abs() < 1e-14);
        assert!((eval_f64(&dv, &[u, v]) - expect_dv).abs() < 1e-14);
    }

    #[test]
    fn symbolic_diff_special_functions() {
        for (src, d_src) in [
            ("tan(u)", "1/cos(u)^2"),
            ("tanh(u)", "1/cosh(u)^2"),
            ("log(u)", "1/u"),
            ("sqrt(u)", "0.5/sqrt(u)"),
        ] {
            let d = diff(&expr(src), 0);
            let want = expr(d_src);
            for &u in &[0.3, 0.9, 1.4] {
                assert!(
                    (eval_f64(&d, &[u, 0.0]) - eval_f64(&want, &[u, 0.0])).abs() < 1e-13,
                    "d/du {src} at {u}"
                );
            }
        }
    }

    #[test]
    fn sphere_metric_and_scalar() {
        for r in [0.5, 1.0, 2.0] {
            let chart = builtin_chart(
                "sphere",
                BuiltinParams {
                    radius: r,
                    ..BuiltinParams::default()
                },
            )
            .unwrap();
            let oracle = ClassicalOracle::new(&chart);
            let u = [1.1, 0.9];
            // g = diag(r² sin²θ, r²) in (φ, θ).
            let g = oracle.metric(&u);
            assert!((g[0][0] - r * r * u[1].sin().powi(2)).abs() < 1e-12);
            assert!((g[1][1] - r * r).abs() < 1e-12);
            assert!(g[0][1].abs() < 1e-12);
            let scalar = oracle.scalar(&u);
            assert!(
                (scalar - sphere_scalar_closed_form(r)).abs() < 1e-10,
                "r={r}: scalar {scalar}"
            );
        }
    }

    #[test]
    fn torus_gauss_curvature_matches_closed_form() {
        let p = BuiltinParams::default();
        let chart = builtin_chart("torus", p).unwrap();
        let oracle = ClassicalOracle::new(&chart);
        for &phi in &[0.3, 2.0] {
            for &theta in &[0.1, 1.2, 2.8, 4.4] {
                let k = oracle.gauss_curvature(&[phi, theta]);
                let want = torus_gauss_closed_form(p.radius_major, p.radius_minor, theta);
                assert!((k - want).abs() < 1e-10, "theta={theta}: {k} vs {want}");
            }
        }
    }

    #[test]
    fn plane_is_flat() {
        let chart = builtin_chart("plane", BuiltinParams::default()).unwrap();
        let oracle = ClassicalOracle::new(&chart);
        let riem = oracle.riemann(&[0.4, -0.8]);
        for bl in riem.iter().flatten().flatten().flatten() {
            assert!(bl.abs() < 1e-14);
        }
    }

    #[test]
    fn lorentzian_ds2_scalar() {
        // The chart embeds dS₂ in mostly-minus R^(1,2); its induced metric
        // has signature (+,−), so the classical scalar is −2 (it would be
        // +2 in the mostly-plus convention, since R flips under g → −g).
        let chart = builtin_chart("ds2", BuiltinParams::default()).unwrap();
        let oracle = ClassicalOracle::new(&chart);
        let scalar = oracle.scalar(&[0.4, 1.7]);
        assert!((scalar + 2.0).abs() < 1e-10, "scalar {scalar}");
    }

    #[test]
    fn hyperbolic_scalar_sign_follows_metric_convention() {
        // The hyperboloid chart induces a *negative definite* metric in
        // mostly-minus R^(1,2); R = +2 here corresponds to the familiar
        // −2 of H² with a positive definite metric.
        let chart = builtin_chart("hyperbolic-h2", BuiltinParams::default()).unwrap();
        let oracle = ClassicalOracle::new(&chart);
        let scalar = oracle.scalar(&[1.2, 0.6]);
        assert!((scalar - 2.0).abs() < 1e-10, "scalar {scalar}");
    }

    #[test]
    fn killing_oracle_accepts_and_rejects() {
        let chart = builtin_chart("sphere", BuiltinParams::default()).unwrap();
        let oracle = ClassicalOracle::new(&chart);
        let rot = chart.fields.iter().find(|f| f.name == "rotation-z").unwrap();
        let bad = chart.fields.iter().find(|f| f.name == "nonkilling").unwrap();
        let u = [0.8, 1.2];
        assert!(oracle.killing_residual(&chart, rot, &u) < 1e-12);
        assert!(oracle.killing_residual(&chart, bad, &u) > 0.1);
    }
}
