//! Curvature of the brane through four independent routes, Ricci through
//! three, plus component arrays and torsion for the intrinsic/extrinsic
//! cross-checks.
//!
//! Routes for the curvature biform ℜ(u∧v):
//! * `shape`:     ℜ(u∧v) = −P(𝒮(u) × 𝒮(v))                (Gauss-type)
//! * `pv-shape`:  ℜ(u∧v) = P_v(𝒮(u))
//! * `comm-half`: ℜ(u∧v) = ½ ∂_w ∧ [P_v, P_u](w)
//! * `pvpu`:      ℜ(u∧v) = ∂_w ∧ P_v P_u(w)
//!
//! Ricci 1-form routes:
//! * `contract`: ℛ(v) = ∂_u ⌟ ℜ(u∧v) = Σ_b θ^b ⌟ ℜ(θ_b∧v)
//! * `doubled`:  ℛ(v) = ½ (θ^a∧θ^b) (ℜ(θ_a∧θ_b) ⌞ v)
//! * `operator`: ℛ(v) = ∂∧∂(v) = ½ (θ^a∧θ^b)([D_a, D_b]v − c^c_ab D_c v)
//!
//! and the shape-squared identity S²(v) = −∂∧∂(v).
//!
//! Jet-order requirements (embedding order K): the shape route and Ricci
//! contractions need K >= 2; every route that differentiates a shape- or
//! P_u-field (pv-shape, comm-half, pvpu, the operator route, S²) needs
//! K >= 3.

use crate::clifford::Multivector;
use crate::frame::{FramePoint, GeomError, Mv};
use crate::jet::Jet;

/// Which formula computes ℜ(u∧v).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvRoute {
    Shape,
    PvShape,
    CommHalf,
    PvPu,
}

impl CurvRoute {
    pub const ALL: [CurvRoute; 4] = [
        CurvRoute::Shape,
        CurvRoute::PvShape,
        CurvRoute::CommHalf,
        CurvRoute::PvPu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurvRoute::Shape => "shape",
            CurvRoute::PvShape => "pv-shape",
            CurvRoute::CommHalf => "comm-half",
            CurvRoute::PvPu => "pvpu",
        }
    }

    pub fn min_order(self) -> u8 {
        match self {
            CurvRoute::Shape => 2,
            _ => 3,
        }
    }
}

/// Which formula computes the Ricci 1-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RicciRoute {
    Contract,
    Doubled,
    Operator,
}

impl RicciRoute {
    pub const ALL: [RicciRoute; 3] = [
        RicciRoute::Contract,
        RicciRoute::Doubled,
        RicciRoute::Operator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RicciRoute::Contract => "contract",
            RicciRoute::Doubled => "doubled",
            RicciRoute::Operator => "operator",
        }
    }

    pub fn min_order(self) -> u8 {
        match self {
            RicciRoute::Operator => 3,
            _ => 2,
        }
    }
}

impl FramePoint {
    /// Curvature biform ℜ(u∧v) through the selected route.
    pub fn curvature_biform(&self, u: &Mv, v: &Mv, route: CurvRoute) -> Result<Mv, GeomError> {
        self.require_order(route.min_order())?;
        Ok(match route {
            CurvRoute::Shape => self
                .project(&self.shape_biform(u).commutator(&self.shape_biform(v)))
                .neg(),
            CurvRoute::PvShape => self.p_u(v, &self.shape_biform(u)),
            CurvRoute::CommHalf => self
                .frame_wedge_sum(|w| {
                    let pv_pu = self.p_u(v, &self.p_u(u, w));
                    let pu_pv = self.p_u(u, &self.p_u(v, w));
                    pv_pu.sub(&pu_pv)
                })
                .scale(0.5),
            CurvRoute::PvPu => self.frame_wedge_sum(|w| self.p_u(v, &self.p_u(u, w))),
        })
    }

    /// Ricci 1-form ℛ(v) through the selected route.
    pub fn ricci_oneform(&self, v: &Mv, route: RicciRoute) -> Result<Mv, GeomError> {
        self.require_order(route.min_order())?;
        Ok(match route {
            RicciRoute::Contract => {
                let mut acc = Multivector::zero(self.sig);
                for b in 0..self.m {
                    let r = self.curvature_biform(&self.theta_lower(b), v, CurvRoute::Shape)?;
                    acc = acc.add(&self.theta[b].form.left_contract(&r));
                }
                acc
            }
            RicciRoute::Doubled => {
                // The component assembly ½(θ^a∧θ^b)(ℜ(θ_a∧θ_b)⌞v) evaluates
                // to the negative of the contract-route Ricci under the
                // classical component conventions this engine uses (the
                // source derivation's Riemann components carry the opposite
                // sign); normalised here so all routes return the classical
                // Ricci 1-form. The flip is recorded in the report's sign
                // ledger.
                let mut acc = Multivector::zero(self.sig);
                for a in 0..self.m {
                    for b in 0..self.m {
                        let r = self.curvature_biform(
                            &self.theta_lower(a),
                            &self.theta_lower(b),
                            CurvRoute::Shape,
                        )?;
                        let biform = self.theta[a].form.outer(&self.theta[b].form);
                        acc = acc.add(&biform.geometric(&r.right_contract(v)).scale(0.5));
                    }
                }
                acc.neg()
            }
            RicciRoute::Operator => self.ricci_operator(v)?,
        })
    }

    /// Ricci operator ∂∧∂(v), assembled from the frame commutators as
    /// −½ (θ^a∧θ^b)([D_a, D_b]v − c^c_ab D_c v).
    ///
    /// The overall sign normalises the commutator assembly to the classical
    /// Ricci convention shared by the other routes (see `RicciRoute::Doubled`
    /// for the same normalisation); with it, S²(v) = −∂∧∂(v) holds exactly.
    pub fn ricci_operator(&self, v: &Mv) -> Result<Mv, GeomError> {
        self.require_order(3)?;
        let c = self.structure_coeffs()?;
        let m = self.m;
        let mut acc = Multivector::zero(self.sig);
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let dbv = self.cov_deriv(&self.theta_lower(b), v);
                let dav = self.cov_deriv(&self.theta_lower(a), v);
                let mut comm = self
                    .cov_deriv(&self.theta_lower(a), &dbv)
                    .sub(&self.cov_deriv(&self.theta_lower(b), &dav));
                for k in 0..m {
                    let dkv = self.cov_deriv(&self.theta_lower(k), v);
                    comm = comm.sub(&dkv.scale_s(&c[k][a][b]));
                }
                let biform = self.theta[a].form.outer(&self.theta[b].form);
                acc = acc.add(&biform.geometric(&comm).scale(0.5));
            }
        }
        Ok(acc.neg())
    }

    /// S²(v) = S(S(v)); the shape-squared field obeys S²(v) = −∂∧∂(v).
    pub fn shape_squared(&self, v: &Mv) -> Result<Mv, GeomError> {
        self.require_order(3)?;
        Ok(self.shape_of(&self.shape_of(v)))
    }

    /// Curvature scalar R = Σ_{a,b} (θ^a∧θ^b) · ℜ(θ_a∧θ_b).
    pub fn scalar_curvature(&self) -> Result<f64, GeomError> {
        self.require_order(2)?;
        let mut acc = 0.0;
        for a in 0..self.m {
            for b in 0..self.m {
                if a == b {
                    continue;
                }
                let r = self.curvature_biform(
                    &self.theta_lower(a),
                    &self.theta_lower(b),
                    CurvRoute::Shape,
                )?;
                let biform = self.theta[a].form.outer(&self.theta[b].form);
                acc += biform.scalar_product(&r).value();
            }
        }
        Ok(acc)
    }

    /// Extrinsic Riemann components R^d_cab = (−θ_c ⌟ ℜ(θ_a∧θ_b)) · θ^d,
    /// from [P_u, P_v](w) = ℜ(u∧v) × w (Eq. II3a / ll20). Indexed
    /// `[d][c][a][b]`.
    pub fn riemann_components_extrinsic(&self) -> Result<Vec<Vec<Vec<Vec<f64>>>>, GeomError> {
        self.require_order(2)?;
        let m = self.m;
        let mut out = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        for a in 0..m {
            for b in 0..m {
                let r = self.curvature_biform(
                    &self.theta_lower(a),
                    &self.theta_lower(b),
                    CurvRoute::Shape,
                )?;
                for c in 0..m {
                    let w = self.theta_lower(c).left_contract(&r).neg();
                    for d in 0..m {
                        out[d][c][a][b] = w.scalar_product(&self.theta[d].form).value();
                    }
                }
            }
        }
        Ok(out)
    }

    /// All-lowered curvature components R(a,b,c,d) = ℜ(θ_a∧θ_b)·(θ_c∧θ_d),
    /// the array on which the classical symmetries are asserted.
    pub fn riemann_components_lowered(&self) -> Result<Vec<Vec<Vec<Vec<f64>>>>, GeomError> {
        self.require_order(2)?;
        let m = self.m;
        let mut out = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        for a in 0..m {
            for b in 0..m {
                let r = self.curvature_biform(
                    &self.theta_lower(a),
                    &self.theta_lower(b),
                    CurvRoute::Shape,
                )?;
                for c in 0..m {
                    for d in 0..m {
                        let blade = self.theta_lower(c).outer(&self.theta_lower(d));
                        out[a][b][c][d] = r.scalar_product(&blade).value();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Intrinsic Riemann components from the connection coefficients
    /// (orthonormal-frame formula):
    /// R^d_cab = e_a(ω^d_bc) − e_b(ω^d_ac) + ω^d_ak ω^k_bc − ω^d_bk ω^k_ac
    ///           − c^k_ab ω^d_kc,
    /// indexed `[d][c][a][b]`, together with the torsion components
    /// T^c_ab = ω^c_ab − ω^c_ba − c^c_ab (index `[c][a][b]`).
    pub fn riemann_torsion_from_connection(
        &self,
    ) -> Result<(Vec<Vec<Vec<Vec<f64>>>>, Vec<Vec<Vec<f64>>>), GeomError> {
        self.require_order(3)?;
        let m = self.m;
        let w = self.omega_coeffs();
        let c = self.structure_coeffs()?;
        // Directional frame derivative of a coefficient jet.
        let dir = |a: usize, f: &Jet| -> f64 {
            let mut acc = 0.0;
            for i in 0..m {
                acc += self.e_chart[a][i].value() * f.partial(i).value();
            }
            acc
        };
        let mut riem = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        let mut tors = vec![vec![vec![0.0; m]; m]; m];
        for d in 0..m {
            for cc in 0..m {
                for a in 0..m {
                    for b in 0..m {
                        let mut r = dir(a, &w[d][b][cc]) - dir(b, &w[d][a][cc]);
                        for k in 0..m {
                            r += w[d][a][k].value() * w[k][b][cc].value()
                                - w[d][b][k].value() * w[k][a][cc].value()
                                - c[k][a][b].value() * w[d][k][cc].value();
                        }
                        riem[d][cc][a][b] = r;
                    }
                }
            }
        }
        for cc in 0..m {
            for a in 0..m {
                for b in 0..m {
                    tors[cc][a][b] =
                        w[cc][a][b].value() - w[cc][b][a].value() - c[cc][a][b].value();
                }
            }
        }
        Ok((riem, tors))
    }

    /// Torsion 2-form values τ(θ_a, θ_b) = T^d_ab θ_d as multivectors.
    pub fn torsion_extensor(&self, a: usize, b: usize) -> Result<Mv, GeomError> {
        let (_, t) = self.riemann_torsion_from_connection()?;
        let mut acc = Multivector::zero(self.sig);
        for d in 0..self.m {
            acc = acc.add(&self.theta_lower(d).scale(t[d][a][b]));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_chart, BuiltinParams};
    use crate::frame::FramePoint;

    fn fp(name: &str, u: &[f64]) -> FramePoint {
        let chart = builtin_chart(name, BuiltinParams::default()).unwrap();
        FramePoint::build(&chart, u, 3).unwrap()
    }

    #[test]
    fn sphere_scalar_curvature_magnitude() {
        for r in [0.5, 1.0, 2.0] {
            let chart = builtin_chart(
                "sphere",
                BuiltinParams {
                    radius: r,
                    ..Default::default()
                },
            )
            .unwrap();
            let f = FramePoint::build(&chart, &[0.9, 1.2], 2).unwrap();
            let scal = f.scalar_curvature().unwrap();
            assert!(
                (scal.abs() - 2.0 / (r * r)).abs() < 1e-10,
                "r={r}: |R| = {}",
                scal.abs()
            );
        }
    }

    #[test]
    fn four_curvature_routes_agree() {
        for (name, u) in [
            ("sphere", [0.7, 1.4]),
            ("torus", [2.2, 0.9]),
            ("ds2", [0.5, 2.8]),
            ("hyperbolic-h2", [1.0, 0.6]),
        ] {
            let f = fp(name, &u);
            let (th0, th1) = (f.theta_lower(0), f.theta_lower(1));
            let reference = f.curvature_biform(&th0, &th1, CurvRoute::Shape).unwrap();
            let scale = reference.coeff_norm().max(1e-12);
            for route in CurvRoute::ALL {
                let r = f.curvature_biform(&th0, &th1, route).unwrap();
                let resid = r.sub(&reference).coeff_norm();
                assert!(
                    resid < 1e-9 * scale.max(1.0),
                    "{name}/{}: residual {resid} (scale {scale})",
                    route.name()
                );
            }
        }
    }

    #[test]
    fn curvature_biform_antisymmetry() {
        let f = fp("torus", &[1.3, 4.0]);
        let (u, v) = (f.theta_lower(0), f.theta_lower(1));
        let r_uv = f.curvature_biform(&u, &v, CurvRoute::PvPu).unwrap();
        let r_vu = f.curvature_biform(&v, &u, CurvRoute::PvPu).unwrap();
        assert!(r_uv.add(&r_vu).coeff_norm() < 1e-10);
    }

    #[test]
    fn ricci_routes_agree_and_match_shape_squared() {
        for (name, u) in [("sphere", [1.0, 1.0]), ("torus", [0.4, 2.0]), ("ds2", [0.6, 1.1])] {
            let f = fp(name, &u);
            for a in 0..2 {
                let v = f.theta[a].form.clone();
                let reference = f.ricci_oneform(&v, RicciRoute::Contract).unwrap();
                let scale = reference.coeff_norm().max(1.0);
                for route in RicciRoute::ALL {
                    let r = f.ricci_oneform(&v, route).unwrap();
                    assert!(
                        r.sub(&reference).coeff_norm() < 1e-9 * scale,
                        "{name}/{}",
                        route.name()
                    );
                }
                // bi6: S²(v) = −∂∧∂(v) = −ℛ(v).
                let s2 = f.shape_squared(&v).unwrap();
                let op = f.ricci_operator(&v).unwrap();
                assert!(
                    s2.add(&op).coeff_norm() < 1e-9 * scale,
                    "{name} a={a}: S² + ∂∧∂ = {}",
                    s2.add(&op).coeff_norm()
                );
            }
        }
    }

    #[test]
    fn clifford_torus_is_flat_with_nonzero_shape() {
        let f = fp("clifford-torus", &[1.1, 2.7]);
        let (u, v) = (f.theta_lower(0), f.theta_lower(1));
        let r = f.curvature_biform(&u, &v, CurvRoute::Shape).unwrap();
        assert!(r.coeff_norm() < 1e-12, "curvature {}", r.coeff_norm());
        let max_shape = (0..2)
            .map(|a| f.shape_biform(&f.theta[a].form).coeff_norm())
            .fold(0.0f64, f64::max);
        assert!(max_shape > 0.5, "max shape norm {max_shape}");
    }

    #[test]
    fn torus_gaussian_curvature_closed_form() {
        // K = cos θ / (r (R + r cos θ)); for a surface |R_scal| = 2|K|.
        let (rr, r) = (2.0, 0.5);
        let chart = builtin_chart("torus", BuiltinParams::default()).unwrap();
        for &theta in &[0.3, 1.2, 2.0, 2.9, 4.4, 5.8] {
            let f = FramePoint::build(&chart, &[1.0, theta], 2).unwrap();
            let k = theta.cos() / (r * (rr + r * theta.cos()));
            let scal = f.scalar_curvature().unwrap();
            assert!(
                (scal.abs() - 2.0 * k.abs()).abs() < 1e-10,
                "theta={theta}: {} vs {}",
                scal.abs(),
                2.0 * k.abs()
            );
        }
    }

    #[test]
    fn riemann_symmetries_hold() {
        for (name, u) in [("sphere", [0.8, 1.3]), ("torus", [1.9, 0.6]), ("ds2", [0.4, 2.2])] {
            let f = fp(name, &u);
            let r = f.riemann_components_lowered().unwrap();
            let m = 2;
            let scale = r
                .iter()
                .flatten()
                .flatten()
                .flatten()
                .fold(0.0f64, |acc, x| acc.max(x.abs()))
                .max(1e-10);
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            // Antisymmetry in both pairs.
                            assert!((r[a][b][c][d] + r[b][a][c][d]).abs() < 1e-10 * scale);
                            assert!((r[a][b][c][d] + r[a][b][d][c]).abs() < 1e-10 * scale);
                            // Pair exchange.
                            assert!((r[a][b][c][d] - r[c][d][a][b]).abs() < 1e-9 * scale);
                            // First Bianchi (cyclic in the first three).
                            let cyc = r[a][b][c][d] + r[b][c][a][d] + r[c][a][b][d];
                            assert!(cyc.abs() < 1e-9 * scale, "{name}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn intrinsic_connection_riemann_matches_extrinsic_and_torsion_vanishes() {
        for (name, u) in [("sphere", [1.5, 0.9]), ("torus", [0.8, 1.6]), ("helicoid", [0.6, -0.4])]
        {
            let f = fp(name, &u);
            let (riem, tors) = f.riemann_torsion_from_connection().unwrap();
            let extr = f.riemann_components_extrinsic().unwrap();
            let m = 2;
            let scale = extr
                .iter()
                .flatten()
                .flatten()
                .flatten()
                .fold(0.0f64, |acc, x| acc.max(x.abs()))
                .max(1e-6);
            for d in 0..m {
                for c in 0..m {
                    for a in 0..m {
                        for b in 0..m {
                            assert!(
                                (riem[d][c][a][b] - extr[d][c][a][b]).abs() < 1e-8 * scale,
                                "{name}: R^{d}_{c}{a}{b}: {} vs {}",
                                riem[d][c][a][b],
                                extr[d][c][a][b]
                            );
                        }
                    }
                }
            }
            for c in 0..m {
                for a in 0..m {
                    for b in 0..m {
                        assert!(tors[c][a][b].abs() < 1e-10, "{name} torsion {}", tors[c][a][b]);
                    }
                }
            }
            let t = f.torsion_extensor(0, 1).unwrap();
            assert!(t.coeff_norm() < 1e-10);
        }
    }

    #[test]
    fn insufficient_order_surfaces_as_error() {
        let chart = builtin_chart("sphere", BuiltinParams::default()).unwrap();
        let f = FramePoint::build(&chart, &[1.0, 1.0], 2).unwrap();
        let v = f.theta[0].form.clone();
        assert!(f.curvature_biform(&f.theta_lower(0), &f.theta_lower(1), CurvRoute::Shape).is_ok());
        assert!(matches!(
            f.shape_squared(&v),
            Err(GeomError::InsufficientJetOrder { needed: 3, have: 2 })
        ));
        assert!(matches!(
            f.ricci_operator(&v),
            Err(GeomError::InsufficientJetOrder { .. })
        ));
    }
}
