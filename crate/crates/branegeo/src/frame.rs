//! Frames along the brane, built in jet arithmetic so every frame object
//! carries its own chart derivatives.
//!
//! From the embedding jets we form the coordinate coframe duals
//! γ_i = Σ_j η_jj (∂x^j/∂u^i) dx^j, orthonormalise them under the indefinite
//! ambient scalar product (pivoted Gram–Schmidt), and extend past the
//! tangent block with the ambient coordinate coforms to obtain an
//! orthonormal normal coframe. The tangent and normal pseudoscalars
//! I_m, I_n and the chart components of the frame vectors e_a (needed for
//! directional derivatives) are assembled alongside.

use crate::chart::Chart;
use crate::clifford::{CliffordError, Multivector, Signature};
use crate::dsl::DslError;
use crate::jet::{Jet, Scalar};
use thiserror::Error;

pub type Mv = Multivector<Jet>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("degenerate tangent frame: coordinate coframe does not span an m-plane")]
    DegenerateTangent,
    #[error("isotropic direction encountered where normalisation is required")]
    IsotropicDirection,
    #[error("frame is not orthonormal within tolerance")]
    NotOrthonormal,
    #[error("vector is not tangent to the brane (||P(v) - v|| > 1e-8 ||v||)")]
    NotTangent,
    #[error("insufficient jet order: operator needs embedding jets of order {needed}, have {have}")]
    InsufficientJetOrder { needed: u8, have: u8 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// One orthonormalised coframe element with its metric sign θ^a · θ^a = ±1.
#[derive(Clone, Debug)]
pub struct FrameVector {
    pub form: Mv,
    pub sign: f64,
}

/// Pivoted Gram–Schmidt under the indefinite scalar product.
///
/// `fixed` are already-orthonormal elements to project against (the tangent
/// block when building normals). At each step the remaining candidate with
/// the largest |⟨v,v⟩| after projection is selected (ties broken by lowest
/// index), normalised to ±1, and recorded with its sign. `take` elements are
/// produced; candidates whose residual vanishes (linearly dependent) are
/// skipped when more candidates than `take` are supplied, otherwise they
/// signal a degenerate input. A non-vanishing residual with vanishing norm
/// is an isotropic (null) direction and is always an error.
pub fn orthonormalize(
    candidates: &[Mv],
    fixed: &[FrameVector],
    take: usize,
    tol: f64,
) -> Result<Vec<FrameVector>, GeomError> {
    let mut chosen: Vec<FrameVector> = fixed.to_vec();
    let mut out: Vec<FrameVector> = Vec::with_capacity(take);
    let mut remaining: Vec<Option<Mv>> = candidates.iter().cloned().map(Some).collect();
    let strict = candidates.len() == take;

    while out.len() < take {
        // Project every remaining candidate against the chosen block and
        // measure its residual norm.
        let mut best: Option<(usize, Mv, f64)> = None;
        for (idx, slot) in remaining.iter().enumerate() {
            let Some(v) = slot else { continue };
            let mut r = v.clone();
            for c in &chosen {
                let coef = r.scalar_product(&c.form); // jet
                r = r.sub(&c.form.scale_s(&coef.scale(c.sign)));
            }
            let norm2 = r.scalar_product(&r).value();
            let better = match &best {
                None => true,
                Some((_, _, b)) => norm2.abs() > b.abs(),
            };
            if better {
                best = Some((idx, r, norm2));
            }
        }
        let Some((idx, residual, norm2)) = best else {
            return Err(GeomError::DegenerateTangent);
        };
        if norm2.abs() <= tol {
            // Residual essentially zero vector => dependent direction;
            // non-zero residual with null norm => isotropic.
            if residual.coeff_norm() <= tol.sqrt().max(tol) {
                if strict {
                    return Err(GeomError::DegenerateTangent);
                }
                remaining[idx] = None;
                if remaining.iter().all(Option::is_none) {
                    return Err(GeomError::DegenerateTangent);
                }
                continue;
            }
            return Err(GeomError::IsotropicDirection);
        }
        let sign = norm2.signum();
        let norm2_jet = residual.scalar_product(&residual);
        let inv_len = norm2_jet.scale(sign).sqrt().recip();
        out.push(FrameVector {
            form: residual.scale_s(&inv_len),
            sign,
        });
        chosen.push(out.last().unwrap().clone());
        remaining[idx] = None;
    }
    Ok(out)
}

/// All frame data at one chart point, in jet arithmetic at embedding order K.
#[derive(Clone, Debug)]
pub struct FramePoint {
    pub sig: Signature,
    pub m: usize,
    pub order: u8,
    pub u: Vec<f64>,
    /// Ambient position values.
    pub x: Vec<f64>,
    /// Embedding coordinate jets (order K).
    pub xjets: Vec<Jet>,
    /// Coordinate coframe duals γ_i (order K-1 coefficients).
    pub gamma: Vec<Mv>,
    /// Orthonormal tangent coframe θ^a.
    pub theta: Vec<FrameVector>,
    /// Orthonormal normal coframe ν^t.
    pub normal: Vec<FrameVector>,
    /// Chart components of the frame vectors: e_a = Σ_i e_chart[a][i] ∂u_i.
    pub e_chart: Vec<Vec<Jet>>,
    /// Induced metric g_ij = γ_i · γ_j.
    pub g: Vec<Vec<Jet>>,
    pub i_m: Mv,
    pub i_m_inv: Mv,
    pub i_n: Mv,
    pub i_n_inv: Mv,
}

/// Solve the jet-valued linear system A x = b by Gaussian elimination with
/// partial pivoting on the value parts.
pub(crate) fn solve_jet(a: &[Vec<Jet>], b: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>, GeomError> {
    let n = a.len();
    let k = b.len(); // number of right-hand sides
    let mut m: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            for rhs in b {
                row.push(rhs[i].clone());
            }
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r1, &r2| {
                m[r1][col]
                    .value()
                    .abs()
                    .total_cmp(&m[r2][col].value().abs())
            })
            .unwrap();
        if m[piv][col].value().abs() < 1e-300 {
            return Err(GeomError::DegenerateTangent);
        }
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for j in col..n + k {
            m[col][j] = m[col][j].mul(&inv);
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in col..n + k {
                let t = factor.mul(&m[col][j]);
                m[row][j] = m[row][j].sub(&t);
            }
        }
    }
    Ok((0..k)
        .map(|r| (0..n).map(|i| m[i][n + r].clone()).collect())
        .collect())
}

/// Coordinate coframe duals γ_i = Σ_j η_jj (∂x^j/∂u^i) dx^j.
pub fn coordinate_coframe(sig: Signature, xjets: &[Jet]) -> Vec<Mv> {
    let m = if xjets.is_empty() {
        0
    } else {
        xjets.iter().map(|x| x.vars()).max().unwrap()
    };
    (0..m)
        .map(|i| {
            let mut form = Mv::zero(sig);
            for (j, x) in xjets.iter().enumerate() {
                form.set_coeff(1 << j, x.partial(i).scale(sig.eta(j)));
            }
            form
        })
        .collect()
}

impl FramePoint {
    pub fn build(chart: &Chart, u: &[f64], order: u8) -> Result<FramePoint, GeomError> {
        if u.len() != chart.m() {
            return Err(GeomError::DimensionMismatch(format!(
                "chart has {} parameters, point has {}",
                chart.m(),
                u.len()
            )));
        }
        let sig = chart.sig;
        let (m, n) = (chart.m(), chart.n());
        let xjets = chart.embed_jets(u, order)?;
        let gamma = coordinate_coframe(sig, &xjets);

        // Gram-entry scale sets the degeneracy tolerance.
        let mut scale: f64 = 0.0;
        let mut g = vec![vec![Jet::constant(0.0); m]; m];
        for i in 0..m {
            for j in 0..m {
                let gij = gamma[i].scalar_product(&gamma[j]);
                scale = scale.max(gij.value().abs());
                g[i][j] = gij;
            }
        }
        let tol = 1e-9 * scale.max(1.0);

        let theta = orthonormalize(&gamma, &[], m, tol)?;

        // Extend to a full ambient orthonormal frame with the coordinate
        // coforms as candidates.
        let coforms: Vec<Mv> = (0..n).map(|j| Mv::coform(sig, j)).collect();
        let normal = orthonormalize(&coforms, &theta, n - m, tol)?;

        // Chart components of the frame vectors: solve M e = delta with
        // M[a][i] = θ^a(∂u_i) = Σ_j θ^a_j ∂x^j/∂u^i (no metric factor: a
        // coform applied to a coordinate vector).
        let mut mat = vec![vec![Jet::constant(0.0); m]; m];
        for (a, th) in theta.iter().enumerate() {
            for i in 0..m {
                let mut acc = Jet::constant(0.0);
                for j in 0..n {
                    acc = acc.add(&th.form.coeff(1 << j).mul(&xjets[j].partial(i)));
                }
                mat[a][i] = acc;
            }
        }
        let rhs: Vec<Vec<Jet>> = (0..m)
            .map(|b| {
                (0..m)
                    .map(|a| Jet::constant(if a == b { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        let e_chart = solve_jet(&mat, &rhs)?;

        let wedge_all = |fv: &[FrameVector], start: Mv| -> Mv {
            fv.iter().fold(start, |acc, f| acc.outer(&f.form))
        };
        let i_m = wedge_all(&theta, Mv::scalar(sig, Jet::constant(1.0)));
        let i_n = wedge_all(&normal, i_m.clone());
        let i_m_inv = i_m.blade_inverse()?;
        let i_n_inv = i_n.blade_inverse()?;

        Ok(FramePoint {
            sig,
            m,
            order,
            u: u.to_vec(),
            x: xjets.iter().map(|x| x.value()).collect(),
            xjets,
            gamma,
            theta,
            normal,
            e_chart,
            g,
            i_m,
            i_m_inv,
            i_n,
            i_n_inv,
        })
    }

    /// θ^a as a multivector.
    pub fn theta_form(&self, a: usize) -> &Mv {
        &self.theta[a].form
    }

    /// Lowered frame coform θ_a = η_a θ^a (reciprocal frame element).
    pub fn theta_lower(&self, a: usize) -> Mv {
        self.theta[a].form.scale(self.theta[a].sign)
    }

    /// Directional derivative along the frame vector e_a of a jet-valued
    /// multivector: each ambient component is differentiated along e_a's
    /// chart components. Consumes one jet order.
    pub fn dir_deriv(&self, a: usize, f: &Mv) -> Mv {
        f.map_coeffs(|c| {
            if c.is_constant() {
                return Jet::constant(0.0);
            }
            let mut acc = Jet::constant(0.0);
            for i in 0..self.m {
                acc = acc.add(&self.e_chart[a][i].mul(&c.partial(i)));
            }
            acc
        })
    }

    /// Check that the frame really is orthonormal (value parts), used by
    /// pseudoscalar consumers.
    pub fn validate_orthonormal(&self, tol: f64) -> Result<(), GeomError> {
        let all: Vec<&FrameVector> = self.theta.iter().chain(self.normal.iter()).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let s = a.form.scalar_product(&b.form).value();
                let want = if i == j { a.sign } else { 0.0 };
                if (s - want).abs() > tol {
                    return Err(GeomError::NotOrthonormal);
                }
            }
        }
        Ok(())
    }

    /// Required embedding jet order for an operator; errors otherwise.
    pub fn require_order(&self, needed: u8) -> Result<(), GeomError> {
        if self.order < needed {
            return Err(GeomError::InsufficientJetOrder {
                needed,
                have: self.order,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_chart, BuiltinParams};

    fn mv1(sig: Signature, comps: &[f64]) -> Mv {
        let mut f = Mv::zero(sig);
        for (j, c) in comps.iter().enumerate() {
            f.set_coeff(1 << j, Jet::constant(*c));
        }
        f
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_input() {
        let s = Signature::new(3, 0);
        let input = [mv1(s, &[1.0, 0.0, 0.0]), mv1(s, &[0.0, 1.0, 0.0])];
        let out = orthonormalize(&input, &[], 2, 1e-12).unwrap();
        // Ties broken by lowest index: identity on an orthonormal set.
        assert!(out[0].form.sub(&input[0]).is_zero_within(1e-15));
        assert!(out[1].form.sub(&input[1]).is_zero_within(1e-15));
        assert_eq!((out[0].sign, out[1].sign), (1.0, 1.0));
    }

    #[test]
    fn orthonormalize_pivots_on_largest_norm() {
        // In Cl(1,1) with v1 = dx0 + 0.5 dx1 (⟨v1,v1⟩ = 0.75) and v2 = dx1
        // (⟨v2,v2⟩ = -1): the pivot rule takes v2 first (|-1| > 0.75) with
        // sign -1, and the projected remainder of v1 is dx0 with sign +1.
        let s = Signature::new(1, 1);
        let v1 = mv1(s, &[1.0, 0.5]);
        let v2 = mv1(s, &[0.0, 1.0]);
        let out = orthonormalize(&[v1, v2], &[], 2, 1e-12).unwrap();
        assert!(out[0].form.sub(&mv1(s, &[0.0, 1.0])).is_zero_within(1e-14));
        assert_eq!(out[0].sign, -1.0);
        assert!(out[1].form.sub(&mv1(s, &[1.0, 0.0])).is_zero_within(1e-14));
        assert_eq!(out[1].sign, 1.0);
    }

    #[test]
    fn orthonormalize_rejects_null_direction() {
        let s = Signature::new(1, 1);
        let v = mv1(s, &[1.0, 1.0]); // lightlike
        match orthonormalize(&[v], &[], 1, 1e-12) {
            Err(GeomError::IsotropicDirection) => {}
            other => panic!("expected IsotropicDirection, got {other:?}"),
        }
    }

    #[test]
    fn orthonormalize_rejects_dependent_tangents() {
        let s = Signature::new(3, 0);
        let v1 = mv1(s, &[1.0, 1.0, 0.0]);
        let v2 = mv1(s, &[2.0, 2.0, 0.0]);
        match orthonormalize(&[v1, v2], &[], 2, 1e-12) {
            Err(GeomError::DegenerateTangent) => {}
            other => panic!("expected DegenerateTangent, got {other:?}"),
        }
    }

    #[test]
    fn sphere_coordinate_coframe_at_reference_point() {
        // Unit sphere, (phi, theta) = (0, pi/2): γ_phi = dx2, γ_theta = -dx3.
        let chart = builtin_chart("sphere", BuiltinParams::default()).unwrap();
        let xj = chart.embed_jets(&[0.0, std::f64::consts::FRAC_PI_2], 2).unwrap();
        let gamma = coordinate_coframe(chart.sig, &xj);
        let want_phi = mv1(chart.sig, &[0.0, 1.0, 0.0]);
        let want_theta = mv1(chart.sig, &[0.0, 0.0, -1.0]);
        assert!(gamma[0].value_part().sub(&want_phi.value_part()).is_zero_within(1e-14));
        assert!(gamma[1].value_part().sub(&want_theta.value_part()).is_zero_within(1e-14));
    }

    #[test]
    fn sphere_induced_metric_is_first_fundamental_form() {
        let chart = builtin_chart("sphere", BuiltinParams::default()).unwrap();
        let u = [1.3, 0.8];
        let fp = FramePoint::build(&chart, &u, 2).unwrap();
        let st = u[1].sin();
        assert!((fp.g[0][0].value() - st * st).abs() < 1e-13);
        assert!((fp.g[1][1].value() - 1.0).abs() < 1e-13);
        assert!(fp.g[0][1].value().abs() < 1e-13);
    }

    #[test]
    fn sphere_normal_is_radial() {
        let chart = builtin_chart("sphere", BuiltinParams::default()).unwrap();
        let fp = FramePoint::build(&chart, &[0.0, std::f64::consts::FRAC_PI_2], 2).unwrap();
        assert_eq!(fp.normal.len(), 1);
        // Outward radial at (0, pi/2) is dx1 (up to sign).
        let nu = fp.normal[0].form.value_part();
        let r = nu.coeff(0b001).abs();
        assert!((r - 1.0).abs() < 1e-12);
        fp.validate_orthonormal(1e-12).unwrap();
    }

    #[test]
    fn frame_vectors_are_dual_to_coframe() {
        // θ^a(e_b) = δ^a_b on a curved chart, exactly in jets.
        let chart = builtin_chart("torus", BuiltinParams::default()).unwrap();
        let fp = FramePoint::build(&chart, &[0.7, 2.1], 3).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                // Apply θ^a to e_b = Σ_i E[b][i] ∂u_i.
                let mut acc = 0.0;
                for i in 0..2 {
                    let mut pairing = 0.0;
                    for j in 0..chart.n() {
                        pairing += fp.theta[a].form.coeff(1 << j).value()
                            * fp.xjets[j].partial(i).value();
                    }
                    acc += fp.e_chart[b][i].value() * pairing;
                }
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((acc - want).abs() < 1e-12, "a={a} b={b} got {acc}");
            }
        }
    }

    #[test]
    fn lorentzian_frame_signs_on_ds2() {
        let chart = builtin_chart("ds2", BuiltinParams::default()).unwrap();
        let fp = FramePoint::build(&chart, &[0.4, 1.0], 2).unwrap();
        let mut signs: Vec<f64> = fp.theta.iter().map(|t| t.sign).collect();
        signs.sort_by(f64::total_cmp);
        assert_eq!(signs, vec![-1.0, 1.0]);
        // Normal on dS2 is spacelike... in R^(1,2) the position vector is
        // the normal and x·x = -1, so the normal sign is -1.
        assert_eq!(fp.normal[0].sign, -1.0);
        fp.validate_orthonormal(1e-12).unwrap();
    }

    #[test]
    fn insufficient_order_is_reported() {
        let chart = builtin_chart("plane", BuiltinParams::default()).unwrap();
        let fp = FramePoint::build(&chart, &[0.0, 0.0], 1).unwrap();
        assert!(matches!(
            fp.require_order(2),
            Err(GeomError::InsufficientJetOrder { needed: 2, have: 1 })
        ));
    }
}
