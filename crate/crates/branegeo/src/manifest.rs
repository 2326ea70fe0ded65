//! Plain-text manifest parser for user-supplied branes.
//!
//! Format (sections of `key = value` lines; `#` starts a comment):
//!
//! ```text
//! [ambient]
//! signature = "+,+,+"
//!
//! [chart]
//! params = u,v
//! u = 0..6.283185
//! v = 0.35..2.79
//!
//! [embedding]
//! x1 = "cos(u)*sin(v)"
//! x2 = "sin(u)*sin(v)"
//! x3 = "cos(v)"
//!
//! [killing]            # optional; one key per field component
//! rot_u = "1"
//! rot_v = "0"
//!
//! [sampling]           # optional
//! samples = 64
//! seed = 42
//! grid = 32x32
//! ```
//!
//! Killing keys are `<field>_<param>`; components default to `0` when
//! omitted. Every error carries the 1-based line number it was found on.

use crate::chart::{Chart, VectorField};
use crate::clifford::Signature;
use crate::dsl;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("line {line}: syntax error: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: dimension mismatch: {message}")]
    DimensionMismatch { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
}

/// Optional sampling configuration from a manifest.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SamplingSpec {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub grid: Option<Vec<usize>>,
}

/// Fully validated manifest: a chart plus optional sampling instructions.
#[derive(Debug)]
pub struct Manifest {
    pub chart: Chart,
    pub sampling: SamplingSpec,
}

fn syntax(line: usize, message: impl Into<String>) -> ManifestError {
    ManifestError::SyntaxError {
        line,
        message: message.into(),
    }
}

fn unquote(v: &str) -> &str {
    let v = v.trim();
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

/// Parse a signature string like `"+,+,-"` into (p, q); pluses must come
/// first to match the engine's basis ordering.
fn parse_signature(s: &str, line: usize) -> Result<Signature, ManifestError> {
    let mut p = 0;
    let mut q = 0;
    for tok in s.split(',') {
        match tok.trim() {
            "+" => {
                if q > 0 {
                    return Err(syntax(line, "signature must list all `+` before `-`"));
                }
                p += 1;
            }
            "-" => q += 1,
            other => {
                return Err(syntax(
                    line,
                    format!("signature entries must be `+` or `-`, got `{other}`"),
                ))
            }
        }
    }
    if p + q == 0 {
        return Err(syntax(line, "empty signature"));
    }
    Ok(Signature::new(p, q))
}

fn parse_interval(v: &str, line: usize) -> Result<(f64, f64), ManifestError> {
    let (lo, hi) = v
        .split_once("..")
        .ok_or_else(|| syntax(line, format!("expected interval `lo..hi`, got `{v}`")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| syntax(line, format!("bad interval endpoint `{}`", lo.trim())))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| syntax(line, format!("bad interval endpoint `{}`", hi.trim())))?;
    if !(lo < hi) {
        return Err(syntax(line, format!("empty interval `{v}`")));
    }
    Ok((lo, hi))
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let mut section = String::new();
    let mut signature: Option<(Signature, usize)> = None;
    let mut params: Vec<String> = Vec::new();
    let mut params_line = 0;
    let mut intervals: Vec<(String, (f64, f64), usize)> = Vec::new();
    let mut embedding: Vec<(String, String, usize)> = Vec::new();
    let mut killing: Vec<(String, String, String, usize)> = Vec::new(); // field, param, expr
    let mut sampling = SamplingSpec::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        if let Some(rest) = stripped.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unterminated section header"))?;
            section = name.trim().to_string();
            match section.as_str() {
                "ambient" | "chart" | "embedding" | "killing" | "sampling" => {}
                other => {
                    return Err(syntax(line, format!("unknown section [{other}]")));
                }
            }
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected `key = value`, got `{stripped}`")))?;
        let key = key.trim();
        let value = unquote(value);
        let unknown = |k: &str| ManifestError::UnknownKey {
            line,
            section: section.clone(),
            key: k.to_string(),
        };
        match section.as_str() {
            "" => return Err(syntax(line, "key before any [section]")),
            "ambient" => match key {
                "signature" => signature = Some((parse_signature(value, line)?, line)),
                k => return Err(unknown(k)),
            },
            "chart" => {
                if key == "params" {
                    params = value
                        .split(',')
                        .map(|p| p.trim().to_string())
                        .filter(|p| !p.is_empty())
                        .collect();
                    params_line = line;
                    for (i, p) in params.iter().enumerate() {
                        if params[..i].contains(p) {
                            return Err(syntax(line, format!("duplicate parameter `{p}`")));
                        }
                    }
                } else {
                    intervals.push((key.to_string(), parse_interval(value, line)?, line));
                }
            }
            "embedding" => embedding.push((key.to_string(), value.to_string(), line)),
            "killing" => {
                let (field, param) = key.rsplit_once('_').ok_or_else(|| {
                    syntax(line, format!("killing key `{key}` must be `<field>_<param>`"))
                })?;
                killing.push((field.to_string(), param.to_string(), value.to_string(), line));
            }
            "sampling" => match key {
                "samples" => {
                    sampling.samples = Some(
                        value
                            .parse()
                            .map_err(|_| syntax(line, format!("bad sample count `{value}`")))?,
                    )
                }
                "seed" => {
                    sampling.seed = Some(
                        value
                            .parse()
                            .map_err(|_| syntax(line, format!("bad seed `{value}`")))?,
                    )
                }
                "grid" => {
                    let dims = value
                        .split('x')
                        .map(|d| d.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| syntax(line, format!("bad grid spec `{value}`")))?;
                    sampling.grid = Some(dims);
                }
                k => return Err(unknown(k)),
            },
            _ => unreachable!(),
        }
    }

    let (sig, sig_line) =
        signature.ok_or_else(|| syntax(1, "missing [ambient] signature"))?;
    if params.is_empty() {
        return Err(syntax(1, "missing [chart] params"));
    }

    // Intervals: one per declared parameter, any order, no strays.
    let mut domain = vec![None; params.len()];
    for (name, iv, line) in intervals {
        let i = params.iter().position(|p| *p == name).ok_or_else(|| {
            ManifestError::UnknownKey {
                line,
                section: "chart".to_string(),
                key: name.clone(),
            }
        })?;
        if domain[i].is_some() {
            return Err(syntax(line, format!("duplicate interval for `{name}`")));
        }
        domain[i] = Some(iv);
    }
    let domain = domain
        .into_iter()
        .zip(&params)
        .map(|(d, p)| {
            d.ok_or_else(|| syntax(params_line, format!("missing interval for parameter `{p}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let n = sig.p + sig.q;
    if embedding.len() != n {
        return Err(ManifestError::DimensionMismatch {
            line: embedding.last().map(|e| e.2).unwrap_or(sig_line),
            message: format!(
                "signature has {n} slots but [embedding] lists {} expressions",
                embedding.len()
            ),
        });
    }
    let exprs = embedding
        .iter()
        .map(|(key, src, line)| {
            dsl::parse(src, &params).map_err(|e| syntax(*line, format!("in `{key}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    // Group killing components by field name; missing components are zero.
    let mut fields: Vec<VectorField> = Vec::new();
    for (field, param, src, line) in killing {
        let i = params.iter().position(|p| *p == param).ok_or_else(|| {
            syntax(
                line,
                format!("killing key `{field}_{param}`: unknown parameter `{param}`"),
            )
        })?;
        let expr = dsl::parse(&src, &params)
            .map_err(|e| syntax(line, format!("in `{field}_{param}`: {e}")))?;
        let entry = match fields.iter_mut().find(|f| f.name == field) {
            Some(f) => f,
            None => {
                fields.push(VectorField {
                    name: field.clone(),
                    components: vec![dsl::parse("0", &params).unwrap(); params.len()],
                    expect_killing: true,
                });
                fields.last_mut().unwrap()
            }
        };
        entry.components[i] = expr;
    }

    Ok(Manifest {
        chart: Chart {
            name: "manifest".to_string(),
            params,
            domain,
            sig,
            embedding: exprs,
            fields,
        },
        sampling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = r#"
# unit sphere
[ambient]
signature = "+,+,+"

[chart]
params = u,v
u = 0..6.283185
v = 0.35..2.79

[embedding]
x1 = "cos(u)*sin(v)"
x2 = "sin(u)*sin(v)"
x3 = "cos(v)"

[killing]
rot_u = "1"
rot_v = "0"

[sampling]
samples = 16
seed = 7
"#;

    #[test]
    fn sphere_manifest_parses() {
        let m = parse_manifest(SPHERE).unwrap();
        assert_eq!(m.chart.m(), 2);
        assert_eq!(m.chart.embedding.len(), 3);
        assert_eq!(m.chart.sig, Signature::new(3, 0));
        assert_eq!(m.chart.fields.len(), 1);
        assert_eq!(m.chart.fields[0].name, "rot");
        assert_eq!(m.sampling.samples, Some(16));
        assert_eq!(m.sampling.seed, Some(7));
    }

    #[test]
    fn embedding_count_mismatch() {
        let text = SPHERE.replace("x3 = \"cos(v)\"\n", "");
        match parse_manifest(&text) {
            Err(ManifestError::DimensionMismatch { .. }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_parameter_is_named() {
        let text = SPHERE.replace("params = u,v", "params = u,u");
        let err = parse_manifest(&text).unwrap_err();
        assert!(err.to_string().contains("duplicate parameter `u`"));
        assert!(err.to_string().contains("line 7"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = SPHERE.replace("signature =", "metric =");
        match parse_manifest(&text) {
            Err(ManifestError::UnknownKey { section, key, line }) => {
                assert_eq!(section, "ambient");
                assert_eq!(key, "metric");
                assert_eq!(line, 4);
            }
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn bad_expression_reports_line() {
        let text = SPHERE.replace("cos(v)", "cos(v");
        let err = parse_manifest(&text).unwrap_err();
        assert!(err.to_string().starts_with("line 14"), "{err}");
    }

    #[test]
    fn empty_interval_rejected() {
        let text = SPHERE.replace("v = 0.35..2.79", "v = 2.79..0.35");
        assert!(matches!(
            parse_manifest(&text),
            Err(ManifestError::SyntaxError { line: 9, .. })
        ));
    }
}
