//! `branegeo` — verification and reporting CLI for the submanifold engine.
//!
//! Exit codes: 0 all checks pass; 1 identity failure; 2 input error;
//! 3 jet-order precondition failure.

use std::path::PathBuf;
use std::process::ExitCode;

use branegeo::chart::{builtin_chart, BuiltinParams, Chart, BUILTIN_NAMES};
use branegeo::frame::FramePoint;
use branegeo::manifest::parse_manifest;
use branegeo::report::{report_csv, report_json, run_report, verify_json, Quantity};
use branegeo::sample::sample_points;
use branegeo::suite::{run_suite, CheckRecord, SuiteConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "branegeo", version, about = "Clifford-bundle submanifold geometry engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Target {
    /// Builtin manifold name (see `branegeo examples`).
    #[arg(long, conflicts_with = "manifest")]
    manifold: Option<String>,
    /// Path to a manifest file describing a custom brane.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Sphere radius (builtin `sphere`).
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Torus major radius (builtin `torus`).
    #[arg(long, default_value_t = 2.0)]
    radius_major: f64,
    /// Torus minor radius (builtin `torus`).
    #[arg(long, default_value_t = 0.5)]
    radius_minor: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the builtin example manifolds.
    Examples,
    /// Run the full identity suite at seeded sample points.
    Verify {
        #[command(flatten)]
        target: Target,
        /// Number of sample points (manifest [sampling] used as default).
        #[arg(long)]
        samples: Option<usize>,
        /// Seed for the documented 64-bit linear congruential sampler.
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance: pass iff residual <= max(tol, tol*(|lhs|+|rhs|)).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Jet truncation order (3 = full; 2 surfaces order preconditions).
        #[arg(long, default_value_t = 3)]
        order: u8,
        /// Also write the full JSON report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tabulate geometric quantities over a parameter grid.
    Report {
        #[command(flatten)]
        target: Target,
        /// Grid spec, e.g. `32x32`.
        #[arg(long)]
        grid: String,
        /// Comma-separated subset of metric,shape,curvature,ricci,scalar,hills.
        #[arg(long)]
        quantities: String,
        /// Output format.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        order: u8,
    },
    /// Check whether a vector field is Killing and report the Maxwell encoding.
    Killing {
        #[command(flatten)]
        target: Target,
        /// Field name attached to the chart, or comma-separated chart
        /// component expressions.
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

struct InputError(String);

fn resolve_target(t: &Target) -> Result<(Chart, String, Option<branegeo::manifest::SamplingSpec>), InputError> {
    match (&t.manifold, &t.manifest) {
        (Some(name), None) => {
            let params = BuiltinParams {
                radius: t.radius,
                radius_major: t.radius_major,
                radius_minor: t.radius_minor,
            };
            let chart = builtin_chart(name, params).ok_or_else(|| {
                InputError(format!(
                    "unknown manifold `{name}`; available: {}",
                    BUILTIN_NAMES.join(", ")
                ))
            })?;
            Ok((chart, name.clone(), None))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
            let m = parse_manifest(&text).map_err(|e| InputError(e.to_string()))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "manifest".to_string());
            Ok((m.chart, name, Some(m.sampling)))
        }
        _ => Err(InputError(
            "exactly one of --manifold or --manifest is required".to_string(),
        )),
    }
}

/// Aggregate records per check name, preserving first-seen order.
fn summarize(checks: &[CheckRecord]) -> Vec<(String, usize, usize, f64)> {
    let mut order: Vec<String> = Vec::new();
    let mut agg: std::collections::HashMap<String, (usize, usize, f64)> =
        std::collections::HashMap::new();
    for c in checks {
        let e = agg.entry(c.name.clone()).or_insert_with(|| {
            order.push(c.name.clone());
            (0, 0, 0.0)
        });
        e.0 += 1;
        if !c.pass {
            e.1 += 1;
        }
        if c.rel_residual > e.2 {
            e.2 = c.rel_residual;
        }
    }
    order
        .into_iter()
        .map(|name| {
            let (n, fails, worst) = agg[&name];
            (name, n, fails, worst)
        })
        .collect()
}

fn cmd_verify(
    target: &Target,
    samples: Option<usize>,
    seed: Option<u64>,
    tol: f64,
    order: u8,
    json: &Option<PathBuf>,
) -> Result<u8, InputError> {
    if !(1..=3).contains(&order) {
        return Err(InputError(format!("--order must be 1..=3, got {order}")));
    }
    let (chart, name, sampling) = resolve_target(target)?;
    let sampling = sampling.unwrap_or_default();
    let cfg = SuiteConfig {
        samples: samples.or(sampling.samples).unwrap_or(64),
        seed: seed.or(sampling.seed).unwrap_or(42),
        order,
        tol,
    };
    let checks = run_suite(&chart, &cfg).map_err(|e| InputError(e.to_string()))?;

    let mut jet_order_failure = false;
    let mut failures = 0usize;
    for c in &checks {
        if !c.pass {
            failures += 1;
            if c.method == "insufficient-jet-order" {
                jet_order_failure = true;
            }
        }
    }
    for (check, n, fails, worst) in summarize(&checks) {
        let status = if fails == 0 { "PASS" } else { "FAIL" };
        println!("{status} {check}  points={n} failed={fails} max_rel={worst:e}");
    }
    println!(
        "verify {name}: {}/{} records passed (samples={} seed={} order={} tol={:e})",
        checks.len() - failures,
        checks.len(),
        cfg.samples,
        cfg.seed,
        cfg.order,
        cfg.tol
    );
    if let Some(path) = json {
        std::fs::write(path, verify_json(&name, &cfg, &checks))
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if jet_order_failure {
        3
    } else if failures > 0 {
        1
    } else {
        0
    })
}

fn cmd_report(
    target: &Target,
    grid: &str,
    quantities: &str,
    format: &str,
    out: &Option<PathBuf>,
    order: u8,
) -> Result<u8, InputError> {
    let (chart, name, _) = resolve_target(target)?;
    let dims: Vec<usize> = grid
        .split('x')
        .map(|d| d.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| InputError(format!("bad --grid `{grid}`, expected e.g. 32x32")))?;
    if dims.len() != chart.m() || dims.iter().any(|&d| d == 0) {
        return Err(InputError(format!(
            "--grid must give {} positive sizes for this chart",
            chart.m()
        )));
    }
    let qs: Vec<Quantity> = quantities
        .split(',')
        .map(|q| {
            Quantity::parse(q.trim())
                .ok_or_else(|| InputError(format!("unknown quantity `{}`", q.trim())))
        })
        .collect::<Result<_, _>>()?;
    if qs.is_empty() {
        return Err(InputError("--quantities must not be empty".to_string()));
    }
    let (report, columns) =
        run_report(&chart, &name, &dims, &qs, order).map_err(|e| InputError(e.to_string()))?;
    let text = match format {
        "csv" => report_csv(&report, &columns),
        "json" => report_json(&report),
        other => return Err(InputError(format!("unknown format `{other}`"))),
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_killing(
    target: &Target,
    field: &str,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<u8, InputError> {
    let (chart, name, _) = resolve_target(target)?;
    let vf = if let Some(f) = chart.fields.iter().find(|f| f.name == field) {
        f.clone()
    } else {
        let comps = field
            .split(',')
            .map(|src| branegeo::dsl::parse(src.trim(), &chart.params))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| {
                InputError(format!(
                    "`{field}` is neither a field of `{name}` nor a component list: {e}"
                ))
            })?;
        if comps.len() != chart.m() {
            return Err(InputError(format!(
                "field needs {} components, got {}",
                chart.m(),
                comps.len()
            )));
        }
        branegeo::chart::VectorField {
            name: "custom".to_string(),
            components: comps,
            expect_killing: true,
        }
    };

    let pts = sample_points(&chart.domain, samples, seed);
    let mut max_killing: f64 = 0.0;
    let mut max_div: f64 = 0.0;
    let mut max_e4: f64 = 0.0;
    let mut max_e7: f64 = 0.0;
    for u in &pts {
        let f = FramePoint::build(&chart, u, 3).map_err(|e| InputError(e.to_string()))?;
        let a = f.field_oneform(&vf).map_err(|e| InputError(e.to_string()))?;
        let kr = f.killing_residuals(&a).map_err(|e| InputError(e.to_string()))?;
        let mr = f.maxwell_residuals(&a).map_err(|e| InputError(e.to_string()))?;
        max_killing = max_killing.max(kr.killing_norm);
        max_div = max_div.max(kr.div_norm);
        max_e4 = max_e4.max(mr.e4_residual);
        max_e7 = max_e7.max(mr.e7_residual);
    }
    println!("killing {name} field={}:", vf.name);
    println!("  max |sym cov deriv| = {max_killing:e}");
    println!("  max |delta A|       = {max_div:e}");
    println!("  max E4 residual     = {max_e4:e}");
    println!("  max e7 residual     = {max_e7:e}");
    let killing = max_killing <= tol && max_div <= tol;
    println!(
        "  verdict: {}",
        if killing { "Killing field" } else { "not a Killing field" }
    );
    Ok(if killing { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Examples => {
            for name in BUILTIN_NAMES {
                let chart = builtin_chart(name, BuiltinParams::default()).unwrap();
                let fields: Vec<&str> =
                    chart.fields.iter().map(|f| f.name.as_str()).collect();
                println!(
                    "{name}: m={} n={} signature=({},{}) fields=[{}]",
                    chart.m(),
                    chart.embedding.len(),
                    chart.sig.p,
                    chart.sig.q,
                    fields.join(", ")
                );
            }
            Ok(0)
        }
        Cmd::Verify {
            target,
            samples,
            seed,
            tol,
            order,
            json,
        } => cmd_verify(target, *samples, *seed, *tol, *order, json),
        Cmd::Report {
            target,
            grid,
            quantities,
            format,
            out,
            order,
        } => cmd_report(target, grid, quantities, format, out, *order),
        Cmd::Killing {
            target,
            field,
            samples,
            seed,
            tol,
        } => cmd_killing(target, field, *samples, *seed, *tol),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
