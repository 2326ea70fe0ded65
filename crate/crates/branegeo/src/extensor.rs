//! Projection, shape and connection operators on the restricted Clifford
//! bundle, all evaluated in jet arithmetic at a [`FramePoint`].
//!
//! The central objects:
//! * the projection extensor P(C) = (C ⌟ I_m) I_m⁻¹ and its complement;
//! * the restricted Dirac operator d̊F = Σ_k θ^k D̊_{e_k} F, where D̊ is the
//!   flat ambient derivative realised as a jet directional derivative;
//! * the shape operator S(C) = d̊(P(C)) − P(d̊C) and the covariant derivative
//!   of the projection P_u(C) = u·d̊(P(C)) − P(u·d̊C);
//! * the shape biform 𝒮(v) = −(v·d̊ I_m) I_m⁻¹, a tangent∧normal biform;
//! * the covariant derivative D_v C = v·d̊C + 𝒮(v)×C (the ambient
//!   coordinate gauge is parallel, so the Pfaff term is the plain
//!   directional derivative of the ambient components);
//! * the intrinsic Dirac ∂C = Σ_k θ^k D_{e_k}C with wedge/contraction parts
//!   d = ∂∧ and δ = −∂⌟;
//! * connection coefficients ω^a_bc, structure coefficients c^c_ab, and the
//!   connection biforms ω_v (intrinsic) and ω̊_v (ambient frame).

use crate::clifford::Multivector;
use crate::frame::{solve_jet, FramePoint, FrameVector, GeomError, Mv};
use crate::jet::{Jet, Scalar};

/// Which graded part of a Dirac-type operator to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiracPart {
    Full,
    Wedge,
    Contract,
}

fn part_product(theta: &Mv, df: &Mv, part: DiracPart) -> Mv {
    match part {
        DiracPart::Full => theta.geometric(df),
        DiracPart::Wedge => theta.outer(df),
        DiracPart::Contract => theta.left_contract(df),
    }
}

impl FramePoint {
    /// Projection onto the tangent algebra: P(C) = (C ⌟ I_m) I_m⁻¹.
    pub fn project(&self, c: &Mv) -> Mv {
        c.left_contract(&self.i_m).geometric(&self.i_m_inv)
    }

    /// Complementary (normal) projection P⊥(C) = C − P(C).
    pub fn project_perp(&self, c: &Mv) -> Mv {
        c.sub(&self.project(c))
    }

    /// Projection onto the normal algebra (grade parts built from normals
    /// only); used to split biforms into tangent / mixed / normal parts.
    pub fn project_normal_algebra(&self, c: &Mv) -> Mv {
        let mut i_l = Multivector::scalar(self.sig, Jet::constant(1.0));
        for nv in &self.normal {
            i_l = i_l.outer(&nv.form);
        }
        let inv = i_l.blade_inverse().expect("normal pseudoscalar invertible");
        c.left_contract(&i_l).geometric(&inv)
    }

    /// Enforce the tangency contract ||P(v) − v|| <= 1e-8 ||v|| on values.
    pub fn check_tangent(&self, v: &Mv) -> Result<(), GeomError> {
        let norm = v.coeff_norm();
        if self.project(v).sub(v).coeff_norm() > 1e-8 * norm.max(1e-300) {
            return Err(GeomError::NotTangent);
        }
        Ok(())
    }

    /// Directional flat derivative D̊_v F = Σ_k (v·θ^k) D̊_{e_k} F for a
    /// tangent direction v (given as a 1-form).
    pub fn flat_dir(&self, v: &Mv, f: &Mv) -> Mv {
        let mut acc = Multivector::zero(self.sig);
        for k in 0..self.m {
            let vk = v.scalar_product(&self.theta[k].form);
            if vk.is_zero() {
                continue;
            }
            acc = acc.add(&self.dir_deriv(k, f).scale_s(&vk));
        }
        acc
    }

    /// Restricted Dirac operator d̊F = Σ_k θ^k D̊_{e_k} F (or its wedge /
    /// contraction part).
    pub fn restricted_dirac(&self, f: &Mv, part: DiracPart) -> Mv {
        let mut acc = Multivector::zero(self.sig);
        for k in 0..self.m {
            let df = self.dir_deriv(k, f);
            acc = acc.add(&part_product(&self.theta[k].form, &df, part));
        }
        acc
    }

    /// Shape biform 𝒮(v) = −(v·d̊ I_m) I_m⁻¹ for tangent v.
    pub fn shape_biform(&self, v: &Mv) -> Mv {
        self.flat_dir(v, &self.i_m).geometric(&self.i_m_inv).neg()
    }

    /// Shape biform through the frame route 𝒮(v) = −Σ_a P⊥(D̊_v θ_a) ∧ θ^a,
    /// an independent assembly used in cross-checks.
    pub fn shape_biform_frame_route(&self, v: &Mv) -> Mv {
        let mut acc = Multivector::zero(self.sig);
        for a in 0..self.m {
            let d = self.flat_dir(v, &self.theta_lower(a));
            acc = acc.add(&self.project_perp(&d).outer(&self.theta[a].form));
        }
        acc.neg()
    }

    /// Shape operator S(C) = d̊(P(C)) − P(d̊C).
    pub fn shape_of(&self, c: &Mv) -> Mv {
        let dp = self.restricted_dirac(&self.project(c), DiracPart::Full);
        let pd = self.project(&self.restricted_dirac(c, DiracPart::Full));
        dp.sub(&pd)
    }

    /// Covariant derivative of the projection extensor applied pointwise:
    /// P_u(C) = u·d̊(P(C)) − P(u·d̊C). The derivative terms of the field C
    /// cancel, so any jet extension of C yields the extensor value.
    pub fn p_u(&self, u: &Mv, c: &Mv) -> Mv {
        let a = self.flat_dir(u, &self.project(c));
        let b = self.project(&self.flat_dir(u, c));
        a.sub(&b)
    }

    /// Covariant derivative D_v C = D̊_v C + 𝒮(v) × C (ambient coordinate
    /// gauge, where the Pfaff derivative is the flat directional one).
    pub fn cov_deriv(&self, v: &Mv, c: &Mv) -> Mv {
        self.flat_dir(v, c).add(&self.shape_biform(v).commutator(c))
    }

    /// Intrinsic Dirac operator ∂C = Σ_k θ^k D_{e_k} C (and parts
    /// d = ∂∧, δ = −∂⌟).
    pub fn intrinsic_dirac(&self, c: &Mv, part: DiracPart) -> Mv {
        let mut acc = Multivector::zero(self.sig);
        for k in 0..self.m {
            let dc = self.cov_deriv(&self.theta_lower(k), c);
            acc = acc.add(&part_product(&self.theta[k].form, &dc, part));
        }
        acc
    }

    /// Exterior derivative dC = ∂∧C of a tangent field.
    pub fn exterior(&self, c: &Mv) -> Mv {
        self.intrinsic_dirac(c, DiracPart::Wedge)
    }

    /// Codifferential δC = −∂⌟C.
    pub fn codifferential(&self, c: &Mv) -> Mv {
        self.intrinsic_dirac(c, DiracPart::Contract).neg()
    }

    /// Frame sum ∂_u ∧ F(u) = Σ_a θ^a ∧ F(θ_a) for an extensor F given as a
    /// closure over the lowered frame coform.
    pub fn frame_wedge_sum(&self, f: impl Fn(&Mv) -> Mv) -> Mv {
        let mut acc = Multivector::zero(self.sig);
        for a in 0..self.m {
            acc = acc.add(&self.theta[a].form.outer(&f(&self.theta_lower(a))));
        }
        acc
    }

    /// Frame sum ∂_u ⌟ F(u) = Σ_a θ^a ⌟ F(θ_a).
    pub fn frame_contract_sum(&self, f: impl Fn(&Mv) -> Mv) -> Mv {
        let mut acc = Multivector::zero(self.sig);
        for a in 0..self.m {
            acc = acc.add(&self.theta[a].form.left_contract(&f(&self.theta_lower(a))));
        }
        acc
    }

    // -- connection & structure coefficients ------------------------------

    /// Structure coefficients c^c_ab of the orthonormal frame:
    /// [e_a, e_b] = c^c_ab e_c, from the chart-component Lie bracket.
    pub fn structure_coeffs(&self) -> Result<Vec<Vec<Vec<Jet>>>, GeomError> {
        let m = self.m;
        // Chart components of [e_a, e_b].
        let mut brackets = vec![vec![vec![Jet::constant(0.0); m]; m]; m]; // [a][b][i]
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                for i in 0..m {
                    let mut acc = Jet::constant(0.0);
                    for j in 0..m {
                        let t1 = self.e_chart[a][j].mul(&self.e_chart[b][i].partial(j));
                        let t2 = self.e_chart[b][j].mul(&self.e_chart[a][i].partial(j));
                        acc = acc.add(&t1.sub(&t2));
                    }
                    brackets[a][b][i] = acc;
                }
            }
        }
        // Express in the frame: solve Σ_c x_c e_chart[c][i] = bracket[i].
        let mut mat = vec![vec![Jet::constant(0.0); m]; m];
        for i in 0..m {
            for c in 0..m {
                // Truncate to the bracket's order so the solve is uniform.
                mat[i][c] = self.e_chart[c][i].clone();
            }
        }
        let mut rhs = Vec::new();
        let mut which = Vec::new();
        for a in 0..m {
            for b in 0..m {
                rhs.push(brackets[a][b].clone());
                which.push((a, b));
            }
        }
        let sols = solve_jet(&mat, &rhs)?;
        let mut c_out = vec![vec![vec![Jet::constant(0.0); m]; m]; m]; // [c][a][b]
        for (idx, (a, b)) in which.iter().enumerate() {
            for c in 0..m {
                c_out[c][*a][*b] = sols[idx][c].clone();
            }
        }
        Ok(c_out)
    }

    /// Connection coefficients of the Levi-Civita connection in the
    /// orthonormal frame: D_{e_b} θ^a = −ω^a_bc θ^c, extracted as
    /// ω^a_bc = −η_c (D_{e_b} θ^a) · θ^c. Returned as jets `[a][b][c]`.
    pub fn omega_coeffs(&self) -> Vec<Vec<Vec<Jet>>> {
        let m = self.m;
        let mut w = vec![vec![vec![Jet::constant(0.0); m]; m]; m];
        for b in 0..m {
            for a in 0..m {
                let d = self.cov_deriv(&self.theta_lower(b), &self.theta[a].form);
                for c in 0..m {
                    let s = d.scalar_product(&self.theta[c].form);
                    w[a][b][c] = s.scale(-self.theta[c].sign);
                }
            }
        }
        w
    }

    /// Intrinsic connection biform ω_v = ½ v^c ω^{ab}_c θ_a ∧ θ_b, with the
    /// second frame index raised by the frame signs.
    pub fn omega_biform(&self, v: &Mv) -> Mv {
        let m = self.m;
        let w = self.omega_coeffs();
        let mut acc = Multivector::zero(self.sig);
        for c in 0..m {
            let vc = v.scalar_product(&self.theta[c].form); // v^c
            if vc.is_zero() {
                continue;
            }
            for a in 0..m {
                for b in 0..m {
                    let coef = w[a][c][b].scale(self.theta[b].sign); // ω^{ab}_c
                    let blade = self.theta_lower(a).outer(&self.theta_lower(b));
                    acc = acc.add(&blade.scale_s(&coef.mul(&vc).scale(0.5)));
                }
            }
        }
        acc
    }

    /// Ambient-frame connection biform ω̊_v = ½ v^c ω̊^{KL}_c θ̊_K ∧ θ̊_L over
    /// the full orthonormal frame {θ^a, ν^t}, with
    /// ω̊^K_cL = −η_L (D̊_{e_c} θ̊^K)·θ̊^L.
    pub fn ambient_omega_biform(&self, v: &Mv) -> Mv {
        let frame: Vec<&FrameVector> = self.theta.iter().chain(self.normal.iter()).collect();
        let n = frame.len();
        let mut acc = Multivector::zero(self.sig);
        for c in 0..self.m {
            let vc = v.scalar_product(&self.theta[c].form);
            if vc.is_zero() {
                continue;
            }
            for k in 0..n {
                let d = self.dir_deriv(c, &frame[k].form);
                for l in 0..n {
                    // ω̊^{KL}_c = η^L ω̊^K_cL = −(D̊_{e_c} θ̊^K)·θ̊^L
                    let coef = d.scalar_product(&frame[l].form).neg();
                    if coef.is_zero() {
                        continue;
                    }
                    let blade = frame[k]
                        .form
                        .scale(frame[k].sign)
                        .outer(&frame[l].form.scale(frame[l].sign));
                    acc = acc.add(&blade.scale_s(&coef.mul(&vc).scale(0.5)));
                }
            }
        }
        acc
    }

    // -- field helpers -----------------------------------------------------

    /// Chart components X^i of the tangent vector metric-dual to a tangent
    /// 1-form: v = Σ_i X^i γ_i.
    pub fn vector_chart_components(&self, v: &Mv) -> Result<Vec<Jet>, GeomError> {
        let m = self.m;
        let mut mat = vec![vec![Jet::constant(0.0); m]; m];
        for j in 0..m {
            for i in 0..m {
                mat[j][i] = self.g[i][j].clone();
            }
        }
        let rhs: Vec<Jet> = (0..m).map(|j| v.scalar_product(&self.gamma[j])).collect();
        let sol = solve_jet(&mat, &[rhs])?;
        Ok(sol.into_iter().next().unwrap())
    }

    /// Tangent 1-form from chart components: Σ_i X^i γ_i.
    pub fn oneform_from_chart(&self, comps: &[Jet]) -> Mv {
        let mut acc = Multivector::zero(self.sig);
        for (i, x) in comps.iter().enumerate() {
            acc = acc.add(&self.gamma[i].scale_s(x));
        }
        acc
    }

    /// Lie bracket of two tangent 1-form fields (as the metric dual of the
    /// bracket of their dual vector fields).
    pub fn lie_bracket(&self, u: &Mv, v: &Mv) -> Result<Mv, GeomError> {
        let uc = self.vector_chart_components(u)?;
        let vc = self.vector_chart_components(v)?;
        let m = self.m;
        let mut w = Vec::with_capacity(m);
        for i in 0..m {
            let mut acc = Jet::constant(0.0);
            for j in 0..m {
                acc = acc.add(&uc[j].mul(&vc[i].partial(j)));
                acc = acc.sub(&vc[j].mul(&uc[i].partial(j)));
            }
            w.push(acc);
        }
        Ok(self.oneform_from_chart(&w))
    }
}
