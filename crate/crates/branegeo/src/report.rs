//! Report assembly: verification JSON and grid reports (CSV/JSON).
//!
//! All emitters are deterministic: rows are ordered by point index, floats
//! are formatted with Rust's shortest round-trip formatting, and JSON maps
//! are ordered, so byte-identical inputs give byte-identical outputs.

use crate::chart::Chart;
use crate::curvature::RicciRoute;
use crate::frame::{FramePoint, GeomError};
use crate::sample::grid_points;
use crate::suite::{sign_ledger, CheckRecord, SuiteConfig};
use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Top-level JSON document for `branegeo verify --json`.
#[derive(Serialize)]
pub struct VerifyReport<'a> {
    pub target: &'a str,
    pub seed: u64,
    pub order: u8,
    pub tolerance: f64,
    pub sign_ledger: serde_json::Value,
    pub checks: &'a [CheckRecord],
}

pub fn verify_json(target: &str, cfg: &SuiteConfig, checks: &[CheckRecord]) -> String {
    let report = VerifyReport {
        target,
        seed: cfg.seed,
        order: cfg.order,
        tolerance: cfg.tol,
        sign_ledger: sign_ledger(),
        checks,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serialization");
    s.push('\n');
    s
}

/// Quantities a grid report can include.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Metric,
    Shape,
    Curvature,
    Ricci,
    Scalar,
    Hills,
}

impl Quantity {
    pub fn parse(s: &str) -> Option<Quantity> {
        Some(match s {
            "metric" => Quantity::Metric,
            "shape" => Quantity::Shape,
            "curvature" => Quantity::Curvature,
            "ricci" => Quantity::Ricci,
            "scalar" => Quantity::Scalar,
            "hills" => Quantity::Hills,
            _ => return None,
        })
    }

    /// Column names this quantity contributes, for a brane of dimension m.
    fn columns(self, m: usize) -> Vec<String> {
        match self {
            Quantity::Metric => {
                let mut cols = Vec::new();
                for i in 0..m {
                    for j in 0..m {
                        cols.push(format!("g_{i}{j}"));
                    }
                }
                cols
            }
            Quantity::Shape => vec!["shape_max_norm".to_string()],
            Quantity::Curvature => vec!["curvature_norm".to_string()],
            Quantity::Ricci => vec!["ricci_norm".to_string()],
            Quantity::Scalar => vec!["scalar".to_string()],
            Quantity::Hills => vec![
                "hills_trace".to_string(),
                "hills_e2_residual".to_string(),
                "hills_vacuum".to_string(),
            ],
        }
    }
}

#[derive(Serialize)]
pub struct GridRow {
    pub index: usize,
    pub point: Vec<f64>,
    pub values: Vec<String>,
}

#[derive(Serialize)]
pub struct GridReport {
    pub target: String,
    pub grid: Vec<usize>,
    pub columns: Vec<String>,
    pub rows: Vec<GridRow>,
}

fn fmt(v: f64) -> String {
    // Avoid "-0" so outputs don't depend on how a zero was computed.
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn row_values(
    chart: &Chart,
    u: &[f64],
    quantities: &[Quantity],
    order: u8,
) -> Result<Vec<String>, GeomError> {
    let f = FramePoint::build(chart, u, order)?;
    let m = f.m;
    let mut vals = Vec::new();
    for q in quantities {
        match q {
            Quantity::Metric => {
                for i in 0..m {
                    for j in 0..m {
                        vals.push(fmt(f.g[i][j].value()));
                    }
                }
            }
            Quantity::Shape => {
                let mut worst: f64 = 0.0;
                for a in 0..m {
                    worst = worst.max(f.shape_biform(&f.theta[a].form).coeff_norm());
                }
                vals.push(fmt(worst));
            }
            Quantity::Curvature => {
                let mut acc = 0.0;
                for a in 0..m {
                    for b in (a + 1)..m {
                        let r = f.curvature_biform(
                            &f.theta_lower(a),
                            &f.theta_lower(b),
                            crate::curvature::CurvRoute::Shape,
                        )?;
                        let n = r.coeff_norm();
                        acc += n * n;
                    }
                }
                vals.push(fmt(acc.sqrt()));
            }
            Quantity::Ricci => {
                let mut acc = 0.0;
                for a in 0..m {
                    let r = f.ricci_oneform(&f.theta[a].form, RicciRoute::Contract)?;
                    let n = r.coeff_norm();
                    acc += n * n;
                }
                vals.push(fmt(acc.sqrt()));
            }
            Quantity::Scalar => vals.push(fmt(f.scalar_curvature()?)),
            Quantity::Hills => {
                let h = f.hills_report(1e-9)?;
                vals.push(h.trace_label());
                vals.push(fmt(h.e2_residual));
                vals.push(h.vacuum.to_string());
            }
        }
    }
    Ok(vals)
}

/// Evaluate the requested quantities over a grid, row-major by point index.
pub fn run_report(
    chart: &Chart,
    target: &str,
    grid: &[usize],
    quantities: &[Quantity],
    order: u8,
) -> Result<(GridReport, Vec<String>), GeomError> {
    let pts = grid_points(&chart.domain, grid);
    let m = chart.m();
    let mut columns: Vec<String> = (0..m).map(|i| chart.params[i].clone()).collect();
    for q in quantities {
        columns.extend(q.columns(m));
    }

    #[cfg(feature = "parallel")]
    let values: Result<Vec<Vec<String>>, GeomError> = pts
        .par_iter()
        .map(|u| row_values(chart, u, quantities, order))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let values: Result<Vec<Vec<String>>, GeomError> = pts
        .iter()
        .map(|u| row_values(chart, u, quantities, order))
        .collect();

    let rows = values?
        .into_iter()
        .zip(&pts)
        .enumerate()
        .map(|(index, (values, point))| GridRow {
            index,
            point: point.clone(),
            values,
        })
        .collect();
    Ok((
        GridReport {
            target: target.to_string(),
            grid: grid.to_vec(),
            columns: columns.clone(),
            rows,
        },
        columns,
    ))
}

pub fn report_csv(report: &GridReport, columns: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# branegeo grid report: target={} grid={}\n",
        report.target,
        report
            .grid
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x")
    ));
    out.push_str("# columns: index, chart coordinates, then requested quantities\n");
    out.push_str("index,");
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in &report.rows {
        let mut fields = vec![row.index.to_string()];
        fields.extend(row.point.iter().map(|v| fmt(*v)));
        fields.extend(row.values.iter().cloned());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn report_json(report: &GridReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_chart, BuiltinParams};

    #[test]
    fn plane_report_has_zero_curvature_columns() {
        let chart = builtin_chart("plane", BuiltinParams::default()).unwrap();
        let qs = [Quantity::Curvature, Quantity::Ricci, Quantity::Scalar];
        let (rep, cols) = run_report(&chart, "plane", &[3, 3], &qs, 3).unwrap();
        assert_eq!(rep.rows.len(), 9);
        let csv = report_csv(&rep, &cols);
        for row in &rep.rows {
            for v in &row.values {
                assert_eq!(v, "0", "csv was:\n{csv}");
            }
        }
    }

    #[test]
    fn report_is_byte_identical_across_runs() {
        let chart = builtin_chart("torus", BuiltinParams::default()).unwrap();
        let qs = [Quantity::Metric, Quantity::Scalar, Quantity::Hills];
        let (r1, c1) = run_report(&chart, "torus", &[4, 4], &qs, 3).unwrap();
        let (r2, c2) = run_report(&chart, "torus", &[4, 4], &qs, 3).unwrap();
        assert_eq!(report_csv(&r1, &c1), report_csv(&r2, &c2));
        assert_eq!(report_json(&r1), report_json(&r2));
    }

    #[test]
    fn torus_scalar_matches_gauss_oracle() {
        let p = BuiltinParams::default();
        let chart = builtin_chart("torus", p).unwrap();
        let (rep, _) = run_report(&chart, "torus", &[8, 8], &[Quantity::Scalar], 3).unwrap();
        for row in &rep.rows {
            let theta = row.point[1];
            let k = row.values[0].parse::<f64>().unwrap() / 2.0;
            let want =
                crate::oracle::torus_gauss_closed_form(p.radius_major, p.radius_minor, theta);
            assert!((k - want).abs() < 1e-8, "theta={theta}: {k} vs {want}");
        }
    }
}
