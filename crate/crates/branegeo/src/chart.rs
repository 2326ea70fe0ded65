//! Chart descriptions: named parameters with domain intervals, an ambient
//! signature, and one embedding expression per ambient coordinate. A small
//! catalog of built-in manifolds (with candidate Killing fields) covers the
//! CLI and the verification suite.

use crate::clifford::Signature;
use crate::dsl::{self, DslError, Expr};
use crate::jet::Jet;

#[derive(Clone, Debug)]
pub struct VectorField {
    pub name: String,
    /// Chart components X^i as expressions in the chart parameters.
    pub components: Vec<Expr>,
    /// Whether this field is expected to be Killing (negative controls set
    /// this to false).
    pub expect_killing: bool,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    pub params: Vec<String>,
    /// Inclusive parameter intervals, one per chart parameter.
    pub domain: Vec<(f64, f64)>,
    /// Ambient pseudo-Euclidean signature.
    pub sig: Signature,
    /// Ambient coordinates as functions of the chart parameters.
    pub embedding: Vec<Expr>,
    /// Candidate Killing fields attached to this chart.
    pub fields: Vec<VectorField>,
}

impl Chart {
    /// Brane dimension m.
    pub fn m(&self) -> usize {
        self.params.len()
    }

    /// Ambient dimension n.
    pub fn n(&self) -> usize {
        self.sig.n()
    }

    /// Jets of the chart parameters at a point.
    pub fn param_jets(&self, u: &[f64], order: u8) -> Vec<Jet> {
        assert_eq!(u.len(), self.m());
        (0..self.m())
            .map(|i| Jet::variable(u[i], i, self.m(), order))
            .collect()
    }

    /// Embedding coordinates as order-K jets at the chart point.
    pub fn embed_jets(&self, u: &[f64], order: u8) -> Result<Vec<Jet>, DslError> {
        let vars = self.param_jets(u, order);
        self.embedding
            .iter()
            .map(|e| dsl::eval_jet(e, &vars))
            .collect()
    }

    /// Centre of the chart domain, a convenient default sample point.
    pub fn domain_center(&self) -> Vec<f64> {
        self.domain.iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }

    fn parse_all(params: &[&str], exprs: &[&str]) -> Vec<Expr> {
        let names: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        exprs
            .iter()
            .map(|e| dsl::parse(e, &names).expect("builtin expression parses"))
            .collect()
    }

    fn builtin(
        name: &str,
        params: &[&str],
        domain: &[(f64, f64)],
        sig: (usize, usize),
        embedding: &[&str],
        fields: &[(&str, &[&str], bool)],
    ) -> Chart {
        let fields = fields
            .iter()
            .map(|(fname, comps, killing)| VectorField {
                name: fname.to_string(),
                components: Chart::parse_all(params, comps),
                expect_killing: *killing,
            })
            .collect();
        Chart {
            name: name.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            domain: domain.to_vec(),
            sig: Signature::new(sig.0, sig.1),
            embedding: Chart::parse_all(params, embedding),
            fields,
        }
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "plane",
    "sphere",
    "torus",
    "paraboloid",
    "helicoid",
    "clifford-torus",
    "ds2",
    "hyperbolic-h2",
];

/// Parameters accepted by [`builtin_chart`]: `radius` for the sphere,
/// `radius-major`/`radius-minor` for the torus. Unused entries are ignored.
#[derive(Clone, Copy, Debug)]
pub struct BuiltinParams {
    pub radius: f64,
    pub radius_major: f64,
    pub radius_minor: f64,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams {
            radius: 1.0,
            radius_major: 2.0,
            radius_minor: 0.5,
        }
    }
}

pub fn builtin_chart(name: &str, bp: BuiltinParams) -> Option<Chart> {
    const TAU: f64 = std::f64::consts::TAU;
    const PI: f64 = std::f64::consts::PI;
    Some(match name {
        "plane" => Chart::builtin(
            "plane",
            &["u", "v"],
            &[(-2.0, 2.0), (-2.0, 2.0)],
            (3, 0),
            &["u", "v", "0"],
            &[
                ("translation-x", &["1", "0"], true),
                ("rotation", &["-v", "u"], true),
                ("shear", &["v", "0"], false),
            ],
        ),
        "sphere" => {
            let r = bp.radius;
            let rs = format!("{r:?}");
            Chart::builtin(
                "sphere",
                &["phi", "theta"],
                &[(0.0, TAU), (0.35, PI - 0.35)],
                (3, 0),
                &[
                    &format!("{rs}*sin(theta)*cos(phi)"),
                    &format!("{rs}*sin(theta)*sin(phi)"),
                    &format!("{rs}*cos(theta)"),
                ],
                &[
                    ("rotation-z", &["1", "0"], true),
                    // theta * d/dphi is not an isometry generator.
                    ("nonkilling", &["theta", "0"], false),
                ],
            )
        }
        "torus" => {
            let (rr, r) = (bp.radius_major, bp.radius_minor);
            let (rrs, rs) = (format!("{rr:?}"), format!("{r:?}"));
            Chart::builtin(
                "torus",
                &["phi", "theta"],
                &[(0.0, TAU), (0.0, TAU)],
                (3, 0),
                &[
                    &format!("({rrs} + {rs}*cos(theta))*cos(phi)"),
                    &format!("({rrs} + {rs}*cos(theta))*sin(phi)"),
                    &format!("{rs}*sin(theta)"),
                ],
                &[("rotation-z", &["1", "0"], true)],
            )
        }
        "paraboloid" => Chart::builtin(
            "paraboloid",
            &["u", "v"],
            &[(-1.5, 1.5), (-1.5, 1.5)],
            (3, 0),
            &["u", "v", "u^2 + v^2"],
            &[("rotation", &["-v", "u"], true)],
        ),
        "helicoid" => Chart::builtin(
            "helicoid",
            &["u", "v"],
            &[(-1.5, 1.5), (-2.0, 2.0)],
            (3, 0),
            &["u*cos(v)", "u*sin(v)", "v"],
            &[("screw", &["0", "1"], true)],
        ),
        "clifford-torus" => Chart::builtin(
            "clifford-torus",
            &["u", "v"],
            &[(0.0, TAU), (0.0, TAU)],
            (4, 0),
            &["cos(u)", "sin(u)", "cos(v)", "sin(v)"],
            &[
                ("rotation-uv", &["1", "0"], true),
                ("rotation-vw", &["0", "1"], true),
            ],
        ),
        // de Sitter dS2 as the unit hyperboloid in R^(1,2).
        "ds2" => Chart::builtin(
            "ds2",
            &["t", "phi"],
            &[(-1.2, 1.2), (0.0, TAU)],
            (1, 2),
            &["sinh(t)", "cosh(t)*cos(phi)", "cosh(t)*sin(phi)"],
            &[
                ("rotation", &["0", "1"], true),
                ("boost", &["cos(phi)", "-tanh(t)*sin(phi)"], true),
            ],
        ),
        // Hyperbolic plane as the upper unit hyperboloid in R^(1,2); the
        // induced metric is negative definite in this signature convention.
        "hyperbolic-h2" => Chart::builtin(
            "hyperbolic-h2",
            &["rho", "phi"],
            &[(0.3, 1.8), (0.0, TAU)],
            (1, 2),
            &["cosh(rho)", "sinh(rho)*cos(phi)", "sinh(rho)*sin(phi)"],
            &[("rotation", &["0", "1"], true)],
        ),
        _ => return None,
    })
}
