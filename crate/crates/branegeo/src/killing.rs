//! Killing fields and the Maxwell-like encoding of their wave equation.
//!
//! For a Killing 1-form A (δA = 0 and symmetrised covariant derivative
//! zero), the engine checks:
//! * E4: ∂∧∂A = ∂·∂A, the even split of the wave operator, where
//!   ∂∧∂ := S² and ∂·∂ := ∂² − ∂∧∂; equivalently ∂²A = 2 S²(A);
//! * F = dA = ∂∧A satisfies dF = 0;
//! * E6: δF = −2 S²(A);
//! * e7: ∂F = 2 S²(A);
//!
//! The Maxwell signs follow the engine's bi6-normalised S² (the same
//! curvature-assembly orientation recorded in the sign ledger), under which
//! δ = −∂⌟ and the two field equations are equivalent because dF = 0.
//! and, for the "little hills" report, the decomposition
//! ∂∧∂θ^a = −𝒯^a + ½𝒯 θ^a (e1) whose trace closure
//! (m/2 − 1)𝒯 = R degenerates at m = 2, where only the rearranged identity
//! S²(θ^a) + ∂∧∂θ^a = 0 (e2/bi6) remains checkable.

use crate::chart::VectorField;
use crate::dsl;
use crate::extensor::DiracPart;
use crate::frame::{FramePoint, GeomError, Mv};

/// Residuals of the Killing condition for a 1-form field at a point.
#[derive(Clone, Debug)]
pub struct KillingReport {
    /// Frobenius norm of the symmetrised covariant derivative
    /// (D_a A)_b + (D_b A)_a.
    pub killing_norm: f64,
    /// |δA|.
    pub div_norm: f64,
}

/// Residuals of the Maxwell-like encoding for a candidate Killing 1-form.
#[derive(Clone, Debug)]
pub struct MaxwellReport {
    pub div_a: f64,
    /// ||∂²A − 2S²(A)|| (E4, even split of the wave operator).
    pub e4_residual: f64,
    /// ||dF|| for F = dA (closedness of the field strength).
    pub df_residual: f64,
    /// ||δF + 2S²(A)|| (E6).
    pub e6_residual: f64,
    /// ||∂F − 2S²(A)|| (e7).
    pub e7_residual: f64,
    pub f_norm: f64,
    pub s2_norm: f64,
}

/// Clifford's "little hills": the Ricci decomposition of the frame coforms.
#[derive(Clone, Debug)]
pub struct HillsReport {
    pub m: usize,
    pub scalar_curvature: f64,
    /// Trace closure 𝒯 = R/(m/2 − 1); `None` when m = 2 (undetermined).
    pub trace: Option<f64>,
    /// max_a ||S²(θ^a) + ∂∧∂θ^a|| (e2 rearranged; must vanish).
    pub e2_residual: f64,
    /// True when all ||S²(θ^a)|| vanish within tolerance (flat/vacuum case).
    pub vacuum: bool,
}

impl HillsReport {
    pub fn trace_label(&self) -> String {
        match self.trace {
            Some(t) => format!("{t:.12e}"),
            None => "undetermined (m=2)".to_string(),
        }
    }
}

impl FramePoint {
    /// Metric-dual 1-form of a chart-component vector field, evaluated at
    /// this point in jet arithmetic.
    pub fn field_oneform(&self, field: &VectorField) -> Result<Mv, GeomError> {
        if field.components.len() != self.m {
            return Err(GeomError::DimensionMismatch(format!(
                "field `{}` has {} components, chart has {} parameters",
                field.name,
                field.components.len(),
                self.m
            )));
        }
        let vars = (0..self.m)
            .map(|i| crate::jet::Jet::variable(self.u[i], i, self.m, self.order))
            .collect::<Vec<_>>();
        let comps = field
            .components
            .iter()
            .map(|e| dsl::eval_jet(e, &vars))
            .collect::<Result<Vec<_>, _>>()
            .map_err(GeomError::from)?;
        Ok(self.oneform_from_chart(&comps))
    }

    /// Killing residuals of a tangent 1-form field.
    pub fn killing_residuals(&self, a: &Mv) -> Result<KillingReport, GeomError> {
        self.require_order(2)?;
        self.check_tangent(a)?;
        let m = self.m;
        // Lowered components of D_{e_a} A along the frame.
        let mut grad = vec![vec![0.0; m]; m];
        for i in 0..m {
            let d = self.cov_deriv(&self.theta_lower(i), a);
            for j in 0..m {
                grad[i][j] = d.scalar_product(&self.theta[j].form).value() * self.theta[j].sign;
            }
        }
        let mut killing_norm = 0.0;
        for i in 0..m {
            for j in 0..m {
                let s = grad[i][j] + grad[j][i];
                killing_norm += s * s;
            }
        }
        let div = self.codifferential(a);
        Ok(KillingReport {
            killing_norm: killing_norm.sqrt(),
            div_norm: div.coeff_norm(),
        })
    }

    /// Maxwell-like encoding residuals for a candidate Killing 1-form.
    pub fn maxwell_residuals(&self, a: &Mv) -> Result<MaxwellReport, GeomError> {
        self.require_order(3)?;
        self.check_tangent(a)?;
        let f = self.exterior(a);
        let s2 = self.shape_squared(a)?;
        let s2_twice = s2.scale(2.0);

        // ∂²A computed by two independent Dirac applications; E4 says its
        // grade-preserving split collapses to 2S²(A) on a Killing form.
        let box_a = self.intrinsic_dirac(&self.intrinsic_dirac(a, DiracPart::Full), DiracPart::Full);
        let e4_residual = box_a.sub(&s2_twice).coeff_norm();

        let df = self.exterior(&f);
        let delta_f = self.codifferential(&f);
        let partial_f = self.intrinsic_dirac(&f, DiracPart::Full);

        Ok(MaxwellReport {
            div_a: self.codifferential(a).coeff_norm(),
            e4_residual,
            df_residual: df.coeff_norm(),
            e6_residual: delta_f.add(&s2_twice).coeff_norm(),
            e7_residual: partial_f.sub(&s2_twice).coeff_norm(),
            f_norm: f.coeff_norm(),
            s2_norm: s2.coeff_norm(),
        })
    }

    /// "Little hills" decomposition report at this point.
    pub fn hills_report(&self, tol: f64) -> Result<HillsReport, GeomError> {
        self.require_order(3)?;
        let m = self.m;
        let scalar = self.scalar_curvature()?;
        let trace = if m == 2 {
            None
        } else {
            Some(scalar / (m as f64 / 2.0 - 1.0))
        };
        let mut e2_residual: f64 = 0.0;
        let mut vacuum = true;
        for a in 0..m {
            let th = self.theta[a].form.clone();
            let s2 = self.shape_squared(&th)?;
            let op = self.ricci_operator(&th)?;
            e2_residual = e2_residual.max(s2.add(&op).coeff_norm());
            if s2.coeff_norm() > tol {
                vacuum = false;
            }
        }
        Ok(HillsReport {
            m,
            scalar_curvature: scalar,
            trace,
            e2_residual,
            vacuum,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_chart, BuiltinParams};

    fn fp(name: &str, u: &[f64]) -> (crate::chart::Chart, FramePoint) {
        let chart = builtin_chart(name, BuiltinParams::default()).unwrap();
        let f = FramePoint::build(&chart, u, 3).unwrap();
        (chart, f)
    }

    fn field<'a>(chart: &'a crate::chart::Chart, name: &str) -> &'a VectorField {
        chart.fields.iter().find(|f| f.name == name).unwrap()
    }

    #[test]
    fn sphere_rotation_is_killing() {
        let (chart, f) = fp("sphere", &[0.9, 1.1]);
        let a = f.field_oneform(field(&chart, "rotation-z")).unwrap();
        let kr = f.killing_residuals(&a).unwrap();
        assert!(kr.killing_norm < 1e-11, "killing norm {}", kr.killing_norm);
        assert!(kr.div_norm < 1e-11, "div {}", kr.div_norm);
    }

    #[test]
    fn sphere_nonkilling_control_fails_loudly() {
        let (chart, f) = fp("sphere", &[0.9, 1.1]);
        let a = f.field_oneform(field(&chart, "nonkilling")).unwrap();
        let kr = f.killing_residuals(&a).unwrap();
        assert!(kr.killing_norm > 0.1, "killing norm {}", kr.killing_norm);
    }

    #[test]
    fn ds2_boost_is_killing() {
        let (chart, f) = fp("ds2", &[0.4, 2.1]);
        let a = f.field_oneform(field(&chart, "boost")).unwrap();
        let kr = f.killing_residuals(&a).unwrap();
        assert!(kr.killing_norm < 1e-10, "killing norm {}", kr.killing_norm);
        assert!(kr.div_norm < 1e-10);
    }

    #[test]
    fn maxwell_encoding_holds_for_killing_fields() {
        for (name, fname, u) in [
            ("sphere", "rotation-z", [1.2, 0.8]),
            ("torus", "rotation-z", [0.5, 2.5]),
            ("ds2", "boost", [0.3, 1.0]),
            ("hyperbolic-h2", "rotation", [1.1, 2.0]),
        ] {
            let (chart, f) = fp(name, &u);
            let a = f.field_oneform(field(&chart, fname)).unwrap();
            let mr = f.maxwell_residuals(&a).unwrap();
            assert!(mr.div_a < 1e-10, "{name}: divA {}", mr.div_a);
            assert!(mr.e4_residual < 1e-9, "{name}: E4 {}", mr.e4_residual);
            assert!(mr.df_residual < 1e-9, "{name}: dF {}", mr.df_residual);
            assert!(mr.e6_residual < 1e-9, "{name}: E6 {}", mr.e6_residual);
            assert!(mr.e7_residual < 1e-9, "{name}: e7 {}", mr.e7_residual);
        }
    }

    #[test]
    fn hills_trace_is_undetermined_for_surfaces() {
        let (_, f) = fp("sphere", &[1.0, 1.3]);
        let hr = f.hills_report(1e-9).unwrap();
        assert_eq!(hr.m, 2);
        assert!(hr.trace.is_none());
        assert_eq!(hr.trace_label(), "undetermined (m=2)");
        assert!(hr.e2_residual < 1e-10, "e2 {}", hr.e2_residual);
        assert!(!hr.vacuum);
        assert!((hr.scalar_curvature.abs() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn hills_vacuum_flag_on_flat_branes() {
        let (_, f) = fp("plane", &[0.3, 0.7]);
        let hr = f.hills_report(1e-9).unwrap();
        assert!(hr.vacuum);
        assert!(hr.scalar_curvature.abs() < 1e-12);
    }

    #[test]
    fn field_dimension_mismatch_is_reported() {
        let (chart, f) = fp("sphere", &[1.0, 1.0]);
        let mut bad = field(&chart, "rotation-z").clone();
        bad.components.pop();
        assert!(matches!(
            f.field_oneform(&bad),
            Err(GeomError::DimensionMismatch(_))
        ));
    }
}
