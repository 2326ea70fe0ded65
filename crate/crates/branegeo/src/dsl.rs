//! Small expression language for embeddings and vector fields.
//!
//! Grammar (binding, loosest to tightest): `+ -`, then `* /`, then unary
//! minus, then `^`; all binary operators are left-associative, so
//! `-x^2 = -(x^2)` and `a - b - c = (a - b) - c`. Exponents of `^` must be
//! numeric constants (optionally negated). Unary functions:
//! neg, sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt. `pi` is a
//! predefined constant. Identifiers resolve against the chart parameter
//! list; anything else is an error with its byte position.

use crate::jet::Jet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DslError {
    #[error("syntax error at position {position}: expected {expected}")]
    SyntaxError { position: usize, expected: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("domain error: {0}")]
    DomainError(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Neg,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "neg" => Func::Neg,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Index into the chart parameter list.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a constant exponent.
    Pow(Box<Expr>, f64),
    Fun(Func, Box<Expr>),
}

// ---------------------------------------------------------------------------
// Tokenizer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token and the byte position where it starts.
    fn next(&mut self) -> Result<(Tok, usize), DslError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
            {
                end += 1;
            }
            // Exponent part: e.g. 1e-3, 2.5E+4.
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut e = end + 1;
                if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                    e += 1;
                }
                if e < self.src.len() && self.src[e].is_ascii_digit() {
                    while e < self.src.len() && self.src[e].is_ascii_digit() {
                        e += 1;
                    }
                    end = e;
                }
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            let value: f64 = text.parse().map_err(|_| DslError::SyntaxError {
                position: start,
                expected: "a number".into(),
            })?;
            self.pos = end;
            return Ok((Tok::Num(value), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            self.pos = end;
            return Ok((Tok::Ident(text.to_string()), start));
        }
        Err(DslError::SyntaxError {
            position: start,
            expected: "a token".into(),
        })
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    params: &'a [String],
}

pub fn parse(src: &str, params: &[String]) -> Result<Expr, DslError> {
    let mut lex = Lexer::new(src);
    let mut toks = Vec::new();
    loop {
        let (t, p) = lex.next()?;
        let end = t == Tok::End;
        toks.push((t, p));
        if end {
            break;
        }
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        params,
    };
    let e = parser.expr()?;
    let (t, p) = parser.peek();
    if t != &Tok::End {
        return Err(DslError::SyntaxError {
            position: p,
            expected: "end of expression or an operator".into(),
        });
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> (&Tok, usize) {
        let (t, p) = &self.toks[self.idx];
        (t, *p)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.peek().0 == &Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let mut base = self.atom()?;
        while self.peek().0 == &Tok::Caret {
            self.bump();
            // Exponents are numeric constants, optionally negated.
            let mut sign = 1.0;
            if self.peek().0 == &Tok::Minus {
                self.bump();
                sign = -1.0;
            }
            let (t, p) = self.bump();
            let Tok::Num(n) = t else {
                return Err(DslError::SyntaxError {
                    position: p,
                    expected: "a constant exponent".into(),
                });
            };
            base = Expr::Pow(Box::new(base), sign * n);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        let (t, p) = self.bump();
        match t {
            Tok::Num(n) => Ok(Expr::Num(n)),
            Tok::LParen => {
                let e = self.expr()?;
                let (t, p) = self.bump();
                if t != Tok::RParen {
                    return Err(DslError::SyntaxError {
                        position: p,
                        expected: "`)`".into(),
                    });
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek().0 == &Tok::LParen {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(DslError::UnknownIdentifier { position: p, name });
                    };
                    self.bump(); // (
                    let arg = self.expr()?;
                    let (t, p2) = self.bump();
                    if t != Tok::RParen {
                        return Err(DslError::SyntaxError {
                            position: p2,
                            expected: "`)`".into(),
                        });
                    }
                    if f == Func::Neg {
                        return Ok(Expr::Neg(Box::new(arg)));
                    }
                    return Ok(Expr::Fun(f, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                if let Some(i) = self.params.iter().position(|q| q == &name) {
                    return Ok(Expr::Var(i));
                }
                Err(DslError::UnknownIdentifier { position: p, name })
            }
            _ => Err(DslError::SyntaxError {
                position: p,
                expected: "a number, identifier, or `(`".into(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation

/// Evaluate in jet arithmetic; `vars[i]` is the jet of the i-th chart
/// parameter (usually `Jet::variable`). Domain violations (log of a
/// non-positive value, division by zero, ...) are reported, not silently
/// propagated as NaN.
pub fn eval_jet(e: &Expr, vars: &[Jet]) -> Result<Jet, DslError> {
    Ok(match e {
        Expr::Num(n) => Jet::constant(*n),
        Expr::Var(i) => vars[*i].clone(),
        Expr::Neg(a) => eval_jet(a, vars)?.neg(),
        Expr::Add(a, b) => eval_jet(a, vars)?.add(&eval_jet(b, vars)?),
        Expr::Sub(a, b) => eval_jet(a, vars)?.sub(&eval_jet(b, vars)?),
        Expr::Mul(a, b) => eval_jet(a, vars)?.mul(&eval_jet(b, vars)?),
        Expr::Div(a, b) => {
            let d = eval_jet(b, vars)?;
            if d.value() == 0.0 {
                return Err(DslError::DomainError("division by zero".into()));
            }
            eval_jet(a, vars)?.div(&d)
        }
        Expr::Pow(a, p) => {
            let base = eval_jet(a, vars)?;
            if p.fract() == 0.0 && p.abs() < 1e9 {
                let n = *p as i32;
                if n < 0 && base.value() == 0.0 {
                    return Err(DslError::DomainError("zero base with negative power".into()));
                }
                base.powi(n)
            } else {
                if base.value() <= 0.0 {
                    return Err(DslError::DomainError(format!(
                        "non-integer power of non-positive base {}",
                        base.value()
                    )));
                }
                base.powf(*p)
            }
        }
        Expr::Fun(f, a) => {
            let x = eval_jet(a, vars)?;
            match f {
                Func::Neg => x.neg(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.value().cos().abs() < 1e-300 {
                        return Err(DslError::DomainError("tan at a pole".into()));
                    }
                    x.tan()
                }
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x.value() <= 0.0 {
                        return Err(DslError::DomainError(format!(
                            "log of non-positive value {}",
                            x.value()
                        )));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x.value() < 0.0 {
                        return Err(DslError::DomainError(format!(
                            "sqrt of negative value {}",
                            x.value()
                        )));
                    }
                    x.sqrt()
                }
            }
        }
    })
}

/// Plain f64 evaluation (used by the classical oracle, which deliberately
/// avoids the jet path).
pub fn eval_f64(e: &Expr, vars: &[f64]) -> f64 {
    match e {
        Expr::Num(n) => *n,
        Expr::Var(i) => vars[*i],
        Expr::Neg(a) => -eval_f64(a, vars),
        Expr::Add(a, b) => eval_f64(a, vars) + eval_f64(b, vars),
        Expr::Sub(a, b) => eval_f64(a, vars) - eval_f64(b, vars),
        Expr::Mul(a, b) => eval_f64(a, vars) * eval_f64(b, vars),
        Expr::Div(a, b) => eval_f64(a, vars) / eval_f64(b, vars),
        Expr::Pow(a, p) => {
            let base = eval_f64(a, vars);
            if p.fract() == 0.0 && p.abs() < 1e9 {
                base.powi(*p as i32)
            } else {
                base.powf(*p)
            }
        }
        Expr::Fun(f, a) => {
            let x = eval_f64(a, vars);
            match f {
                Func::Neg => -x,
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
                Func::Exp => x.exp(),
                Func::Log => x.ln(),
                Func::Sqrt => x.sqrt(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Result<Expr, DslError> {
        parse(src, &["u".into(), "v".into()])
    }

    fn ev(src: &str, u: f64, v: f64) -> f64 {
        eval_f64(&p(src).unwrap(), &[u, v])
    }

    #[test]
    fn precedence_and_associativity() {
        // ^ binds tighter than unary minus: -2^2 = -4.
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        // * / left-assoc: 8/4/2 = 1.
        assert_eq!(ev("8/4/2", 0.0, 0.0), 1.0);
        // - left-assoc: 10-4-3 = 3.
        assert_eq!(ev("10-4-3", 0.0, 0.0), 3.0);
        assert_eq!(ev("2+3*4", 0.0, 0.0), 14.0);
        assert_eq!(ev("(2+3)*4", 0.0, 0.0), 20.0);
        assert_eq!(ev("2*u^2", 3.0, 0.0), 18.0);
    }

    #[test]
    fn functions_and_pi() {
        assert!((ev("sin(pi/2)", 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((ev("cosh(u)^2 - sinh(u)^2", 0.7, 0.0) - 1.0).abs() < 1e-12);
        assert_eq!(ev("neg(v)", 0.0, 2.5), -2.5);
        assert!((ev("exp(log(u))", 1.9, 0.0) - 1.9).abs() < 1e-15);
    }

    #[test]
    fn numeric_literals() {
        assert_eq!(ev("1e-3 + 2.5E+1", 0.0, 0.0), 0.001 + 25.0);
        assert_eq!(ev(".5", 0.0, 0.0), 0.5);
    }

    #[test]
    fn negative_and_fractional_exponents() {
        assert_eq!(ev("u^-2", 2.0, 0.0), 0.25);
        assert!((ev("u^0.5", 9.0, 0.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = p("u + * v").unwrap_err();
        match err {
            DslError::SyntaxError { position, .. } => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        // Non-constant exponent is rejected.
        let err = p("u ^ v").unwrap_err();
        assert!(matches!(err, DslError::SyntaxError { position: 4, .. }));
        // Trailing garbage.
        assert!(p("u v").is_err());
    }

    #[test]
    fn unknown_identifier_reports_name_and_position() {
        let err = p("u + w").unwrap_err();
        assert_eq!(
            err,
            DslError::UnknownIdentifier {
                position: 4,
                name: "w".into()
            }
        );
        // Unknown function name.
        let err = p("frob(u)").unwrap_err();
        assert!(matches!(err, DslError::UnknownIdentifier { position: 0, .. }));
    }

    #[test]
    fn domain_errors() {
        let e = p("log(u)").unwrap();
        let vars = [Jet::variable(-1.0, 0, 2, 2), Jet::variable(0.0, 1, 2, 2)];
        assert!(matches!(
            eval_jet(&e, &vars),
            Err(DslError::DomainError(_))
        ));
        let e = p("1/u").unwrap();
        let vars = [Jet::variable(0.0, 0, 2, 2), Jet::variable(0.0, 1, 2, 2)];
        assert!(matches!(
            eval_jet(&e, &vars),
            Err(DslError::DomainError(_))
        ));
    }

    #[test]
    fn jet_eval_matches_f64_eval() {
        let e = p("sin(u*v) + cos(u)^2 / (2 + tanh(v))").unwrap();
        let (u, v) = (0.8, -0.45);
        let jets = [Jet::variable(u, 0, 2, 3), Jet::variable(v, 1, 2, 3)];
        let j = eval_jet(&e, &jets).unwrap();
        assert!((j.value() - eval_f64(&e, &[u, v])).abs() < 1e-14);
    }
}
