//! A small mathematical expression language over the variables `x`, `y`, `b`
//! and user-named constants, evaluated either in plain floating point or in
//! jet arithmetic.
//!
//! Grammar (EBNF, whitespace-insensitive):
//!
//! ```text
//! expr     := term { ("+" | "-") term }
//! term     := unary { ("*" | "/") unary }
//! unary    := "-" unary | power
//! power    := atom [ "^" exponent ]
//! exponent := ["-"] INT [ "^" exponent ]          (right-associative, folded)
//! atom     := NUMBER | IDENT | IDENT "(" expr {"," expr} ")" | "(" expr ")"
//! ```
//!
//! Exponents are integer literals only, so jet composition stays exact;
//! fractional powers are spelled with `sqrt` or `exp`/`log`.  `pow(u, k)`
//! is the call form of `u ^ k`.  Unknown identifiers parse as named
//! constants and must be bound at evaluation time.

use crate::jets::{Jet, JetError, Var};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Function names admitted in call position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuncName {
    Sin,
    Cos,
    Tan,
    Sqrt,
    Atan,
    Atan2,
    Exp,
    Log,
}

impl FuncName {
    fn lookup(name: &str) -> Option<(FuncName, usize)> {
        Some(match name {
            "sin" => (FuncName::Sin, 1),
            "cos" => (FuncName::Cos, 1),
            "tan" => (FuncName::Tan, 1),
            "sqrt" => (FuncName::Sqrt, 1),
            "atan" => (FuncName::Atan, 1),
            "atan2" => (FuncName::Atan2, 2),
            "exp" => (FuncName::Exp, 1),
            "log" => (FuncName::Log, 1),
            _ => return None,
        })
    }

    fn as_str(&self) -> &'static str {
        match self {
            FuncName::Sin => "sin",
            FuncName::Cos => "cos",
            FuncName::Tan => "tan",
            FuncName::Sqrt => "sqrt",
            FuncName::Atan => "atan",
            FuncName::Atan2 => "atan2",
            FuncName::Exp => "exp",
            FuncName::Log => "log",
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Number(f64),
    Variable(Var),
    Constant(String),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, i32),
    Call(FuncName, Vec<ExprAst>),
}

#[derive(Debug, Error, PartialEq)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unbound constant `{0}`")]
    UnboundConstant(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
    tok_text: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lx = Lexer {
            src,
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
            tok_text: "",
        };
        lx.advance()?;
        Ok(lx)
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Tok::End;
            self.tok_text = "";
            return Ok(());
        }
        let c = bytes[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            self.tok = t;
            self.tok_text = &self.src[self.tok_start..self.pos];
            return Ok(());
        }
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                self.pos += 1;
            }
            if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                let mut la = self.pos + 1;
                if la < bytes.len() && (bytes[la] == b'+' || bytes[la] == b'-') {
                    la += 1;
                }
                if la < bytes.len() && bytes[la].is_ascii_digit() {
                    self.pos = la;
                    while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
            }
            let text = &self.src[start..self.pos];
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            self.tok = Tok::Num(value);
            self.tok_text = text;
            return Ok(());
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            self.tok = Tok::Ident;
            self.tok_text = &self.src[start..self.pos];
            return Ok(());
        }
        Err(ParseError {
            offset: self.pos,
            message: format!("unexpected character `{}`", c as char),
        })
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.tok_start,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.tok == tok {
            self.advance()
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }
}

/// Parses the expression grammar; errors carry the byte offset of the
/// offending token and what was expected there.
pub fn parse(text: &str) -> Result<ExprAst, ParseError> {
    let mut lx = Lexer::new(text)?;
    let ast = parse_sum(&mut lx)?;
    if lx.tok != Tok::End {
        return Err(lx.err("expected end of input"));
    }
    Ok(ast)
}

fn parse_sum(lx: &mut Lexer) -> Result<ExprAst, ParseError> {
    let mut lhs = parse_term(lx)?;
    loop {
        match lx.tok {
            Tok::Plus => {
                lx.advance()?;
                lhs = ExprAst::Add(Box::new(lhs), Box::new(parse_term(lx)?));
            }
            Tok::Minus => {
                lx.advance()?;
                lhs = ExprAst::Sub(Box::new(lhs), Box::new(parse_term(lx)?));
            }
            _ => return Ok(lhs),
        }
    }
}

fn parse_term(lx: &mut Lexer) -> Result<ExprAst, ParseError> {
    let mut lhs = parse_unary(lx)?;
    loop {
        match lx.tok {
            Tok::Star => {
                lx.advance()?;
                lhs = ExprAst::Mul(Box::new(lhs), Box::new(parse_unary(lx)?));
            }
            Tok::Slash => {
                lx.advance()?;
                lhs = ExprAst::Div(Box::new(lhs), Box::new(parse_unary(lx)?));
            }
            _ => return Ok(lhs),
        }
    }
}

fn parse_unary(lx: &mut Lexer) -> Result<ExprAst, ParseError> {
    if lx.tok == Tok::Minus {
        lx.advance()?;
        Ok(ExprAst::Neg(Box::new(parse_unary(lx)?)))
    } else {
        parse_power(lx)
    }
}

fn parse_power(lx: &mut Lexer) -> Result<ExprAst, ParseError> {
    let base = parse_atom(lx)?;
    if lx.tok == Tok::Caret {
        lx.advance()?;
        let exp = parse_exponent(lx)?;
        Ok(ExprAst::Pow(Box::new(base), exp))
    } else {
        Ok(base)
    }
}

/// Integer-literal exponent; a trailing `^` chain folds right-associatively
/// at parse time (`x^2^3` is `x^(2^3)`).
fn parse_exponent(lx: &mut Lexer) -> Result<i32, ParseError> {
    let neg = if lx.tok == Tok::Minus {
        lx.advance()?;
        true
    } else {
        false
    };
    let value = match lx.tok {
        Tok::Num(v) => {
            if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                return Err(lx.err("expected an integer exponent"));
            }
            lx.advance()?;
            v as i32
        }
        _ => return Err(lx.err("expected an integer exponent")),
    };
    let mut value = if neg { -value } else { value };
    if lx.tok == Tok::Caret {
        lx.advance()?;
        let upper = parse_exponent(lx)?;
        if upper < 0 {
            return Err(lx.err("negative exponent not allowed in an exponent tower"));
        }
        value = value.checked_pow(upper as u32).ok_or_else(|| lx.err("exponent overflow"))?;
    }
    Ok(value)
}

fn parse_atom(lx: &mut Lexer) -> Result<ExprAst, ParseError> {
    match lx.tok {
        Tok::Num(v) => {
            lx.advance()?;
            Ok(ExprAst::Number(v))
        }
        Tok::LParen => {
            lx.advance()?;
            let inner = parse_sum(lx)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(inner)
        }
        Tok::Ident => {
            let name = lx.tok_text.to_string();
            lx.advance()?;
            if lx.tok == Tok::LParen {
                lx.advance()?;
                let mut args = vec![parse_sum(lx)?];
                while lx.tok == Tok::Comma {
                    lx.advance()?;
                    args.push(parse_sum(lx)?);
                }
                lx.expect(Tok::RParen, "`)`")?;
                if name == "pow" {
                    if args.len() != 2 {
                        return Err(lx.err("pow takes exactly 2 arguments"));
                    }
                    let exp = match args[1] {
                        ExprAst::Number(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
                        ExprAst::Neg(ref inner) => match **inner {
                            ExprAst::Number(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => -(v as i32),
                            _ => return Err(lx.err("pow exponent must be an integer literal")),
                        },
                        _ => return Err(lx.err("pow exponent must be an integer literal")),
                    };
                    let base = args.swap_remove(0);
                    return Ok(ExprAst::Pow(Box::new(base), exp));
                }
                let (func, arity) = FuncName::lookup(&name)
                    .ok_or_else(|| lx.err(format!("unknown function `{name}`")))?;
                if args.len() != arity {
                    return Err(lx.err(format!("{name} takes exactly {arity} argument(s)")));
                }
                Ok(ExprAst::Call(func, args))
            } else {
                match name.as_str() {
                    "x" => Ok(ExprAst::Variable(Var::X)),
                    "y" => Ok(ExprAst::Variable(Var::Y)),
                    "b" => Ok(ExprAst::Variable(Var::B)),
                    _ => Ok(ExprAst::Constant(name)),
                }
            }
        }
        _ => Err(lx.err("expected a number, name, or `(`")),
    }
}

impl ExprAst {
    /// Evaluates the tree bottom-up in jet arithmetic seeded at (x, y, b).
    pub fn eval_jet(
        &self,
        x: f64,
        y: f64,
        b: f64,
        order: usize,
        constants: &BTreeMap<String, f64>,
    ) -> Result<Jet, EvalError> {
        match self {
            ExprAst::Number(v) => Ok(Jet::constant(*v, order)),
            ExprAst::Variable(var) => Ok(Jet::variable(
                *var,
                match var {
                    Var::X => x,
                    Var::Y => y,
                    Var::B => b,
                },
                order,
            )),
            ExprAst::Constant(name) => constants
                .get(name)
                .map(|v| Jet::constant(*v, order))
                .ok_or_else(|| EvalError::UnboundConstant(name.clone())),
            ExprAst::Neg(inner) => Ok(-&inner.eval_jet(x, y, b, order, constants)?),
            ExprAst::Add(l, r) => Ok(&l.eval_jet(x, y, b, order, constants)?
                + &r.eval_jet(x, y, b, order, constants)?),
            ExprAst::Sub(l, r) => Ok(&l.eval_jet(x, y, b, order, constants)?
                - &r.eval_jet(x, y, b, order, constants)?),
            ExprAst::Mul(l, r) => Ok(&l.eval_jet(x, y, b, order, constants)?
                * &r.eval_jet(x, y, b, order, constants)?),
            ExprAst::Div(l, r) => Ok(l
                .eval_jet(x, y, b, order, constants)?
                .divide(&r.eval_jet(x, y, b, order, constants)?)?),
            ExprAst::Pow(base, k) => Ok(base.eval_jet(x, y, b, order, constants)?.powi(*k)?),
            ExprAst::Call(func, args) => {
                let a0 = args[0].eval_jet(x, y, b, order, constants)?;
                Ok(match func {
                    FuncName::Sin => a0.sin(),
                    FuncName::Cos => a0.cos(),
                    FuncName::Tan => a0.tan()?,
                    FuncName::Sqrt => a0.sqrt()?,
                    FuncName::Atan => a0.atan(),
                    FuncName::Exp => a0.exp(),
                    FuncName::Log => a0.ln()?,
                    FuncName::Atan2 => {
                        let a1 = args[1].eval_jet(x, y, b, order, constants)?;
                        Jet::atan2(&a0, &a1)?
                    }
                })
            }
        }
    }

    /// Plain floating-point evaluation (no derivative tracking).
    pub fn eval_f64(
        &self,
        x: f64,
        y: f64,
        b: f64,
        constants: &BTreeMap<String, f64>,
    ) -> Result<f64, EvalError> {
        Ok(match self {
            ExprAst::Number(v) => *v,
            ExprAst::Variable(Var::X) => x,
            ExprAst::Variable(Var::Y) => y,
            ExprAst::Variable(Var::B) => b,
            ExprAst::Constant(name) => *constants
                .get(name)
                .ok_or_else(|| EvalError::UnboundConstant(name.clone()))?,
            ExprAst::Neg(inner) => -inner.eval_f64(x, y, b, constants)?,
            ExprAst::Add(l, r) => l.eval_f64(x, y, b, constants)? + r.eval_f64(x, y, b, constants)?,
            ExprAst::Sub(l, r) => l.eval_f64(x, y, b, constants)? - r.eval_f64(x, y, b, constants)?,
            ExprAst::Mul(l, r) => l.eval_f64(x, y, b, constants)? * r.eval_f64(x, y, b, constants)?,
            ExprAst::Div(l, r) => l.eval_f64(x, y, b, constants)? / r.eval_f64(x, y, b, constants)?,
            ExprAst::Pow(base, k) => base.eval_f64(x, y, b, constants)?.powi(*k),
            ExprAst::Call(func, args) => {
                let a0 = args[0].eval_f64(x, y, b, constants)?;
                match func {
                    FuncName::Sin => a0.sin(),
                    FuncName::Cos => a0.cos(),
                    FuncName::Tan => a0.tan(),
                    FuncName::Sqrt => a0.sqrt(),
                    FuncName::Atan => a0.atan(),
                    FuncName::Exp => a0.exp(),
                    FuncName::Log => a0.ln(),
                    FuncName::Atan2 => a0.atan2(args[1].eval_f64(x, y, b, constants)?),
                }
            }
        })
    }

    /// Whether the tree mentions the given variable anywhere.
    pub fn uses_var(&self, var: Var) -> bool {
        match self {
            ExprAst::Variable(v) => *v == var,
            ExprAst::Number(_) | ExprAst::Constant(_) => false,
            ExprAst::Neg(a) | ExprAst::Pow(a, _) => a.uses_var(var),
            ExprAst::Add(l, r) | ExprAst::Sub(l, r) | ExprAst::Mul(l, r) | ExprAst::Div(l, r) => {
                l.uses_var(var) || r.uses_var(var)
            }
            ExprAst::Call(_, args) => args.iter().any(|a| a.uses_var(var)),
        }
    }

    /// Names of all constants appearing in the tree.
    pub fn constant_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.collect_constants(&mut names);
        names.sort();
        names.dedup();
        names
    }

    fn collect_constants(&self, out: &mut Vec<String>) {
        match self {
            ExprAst::Constant(name) => out.push(name.clone()),
            ExprAst::Neg(a) | ExprAst::Pow(a, _) => a.collect_constants(out),
            ExprAst::Add(l, r) | ExprAst::Sub(l, r) | ExprAst::Mul(l, r) | ExprAst::Div(l, r) => {
                l.collect_constants(out);
                r.collect_constants(out);
            }
            ExprAst::Call(_, args) => args.iter().for_each(|a| a.collect_constants(out)),
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprAst::Add(..) | ExprAst::Sub(..) => 1,
            ExprAst::Mul(..) | ExprAst::Div(..) => 2,
            ExprAst::Neg(..) => 3,
            ExprAst::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, child: &ExprAst, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < min_prec {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Number(v) => write!(f, "{v}"),
            ExprAst::Variable(Var::X) => write!(f, "x"),
            ExprAst::Variable(Var::Y) => write!(f, "y"),
            ExprAst::Variable(Var::B) => write!(f, "b"),
            ExprAst::Constant(name) => write!(f, "{name}"),
            ExprAst::Neg(a) => {
                write!(f, "-")?;
                self.fmt_child(a, 3, f)
            }
            ExprAst::Add(l, r) => {
                self.fmt_child(l, 1, f)?;
                write!(f, "+")?;
                self.fmt_child(r, 2, f)
            }
            ExprAst::Sub(l, r) => {
                self.fmt_child(l, 1, f)?;
                write!(f, "-")?;
                self.fmt_child(r, 2, f)
            }
            ExprAst::Mul(l, r) => {
                self.fmt_child(l, 2, f)?;
                write!(f, "*")?;
                self.fmt_child(r, 3, f)
            }
            ExprAst::Div(l, r) => {
                self.fmt_child(l, 2, f)?;
                write!(f, "/")?;
                self.fmt_child(r, 3, f)
            }
            ExprAst::Pow(base, k) => {
                self.fmt_child(base, 5, f)?;
                write!(f, "^{k}")
            }
            ExprAst::Call(func, args) => {
                write!(f, "{}(", func.as_str())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn consts(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn precedence_and_value() {
        let ast = parse("1+2*3").unwrap();
        assert_relative_eq!(ast.eval_f64(0.0, 0.0, 0.0, &BTreeMap::new()).unwrap(), 7.0);
        let ast = parse("2*3^2").unwrap();
        assert_relative_eq!(ast.eval_f64(0.0, 0.0, 0.0, &BTreeMap::new()).unwrap(), 18.0);
        // pow binds tighter than unary minus
        let ast = parse("-2^2").unwrap();
        assert_relative_eq!(ast.eval_f64(0.0, 0.0, 0.0, &BTreeMap::new()).unwrap(), -4.0);
        // right-associative exponent tower
        let ast = parse("2^3^2").unwrap();
        assert_relative_eq!(ast.eval_f64(0.0, 0.0, 0.0, &BTreeMap::new()).unwrap(), 512.0);
    }

    #[test]
    fn precessing_family_text_parses_with_constants() {
        let ast = parse("(x^2+y^2)*(1+e*cos(b*(atan2(y,x)-th0)))^2").unwrap();
        assert_eq!(ast.constant_names(), vec!["e".to_string(), "th0".to_string()]);
        // value check at (2, 0), e=0.3, th0=0, b=1.5: 4 * 1.3^2 = 6.76
        let v = ast
            .eval_f64(2.0, 0.0, 1.5, &consts(&[("e", 0.3), ("th0", 0.0)]))
            .unwrap();
        assert_relative_eq!(v, 6.76, max_relative = 1e-15);
        let jet = ast
            .eval_jet(2.0, 0.0, 1.5, 2, &consts(&[("e", 0.3), ("th0", 0.0)]))
            .unwrap();
        assert_relative_eq!(jet.value(), 6.76, max_relative = 1e-14);
    }

    #[test]
    fn parse_error_offset() {
        let err = parse("sin(x").unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(err.message.contains(")"), "message: {}", err.message);

        let err = parse("1+ +2").unwrap_err();
        assert_eq!(err.offset, 3);

        let err = parse("foo(1)").unwrap_err();
        assert!(err.message.contains("unknown function"));

        let err = parse("x^y").unwrap_err();
        assert!(err.message.contains("integer exponent"));
    }

    #[test]
    fn bilinear_jet() {
        let ast = parse("x*y+b").unwrap();
        let jet = ast.eval_jet(2.0, 3.0, 4.0, 1, &BTreeMap::new()).unwrap();
        assert_relative_eq!(jet.value(), 10.0);
        assert_relative_eq!(jet.partial(1, 0, 0).unwrap(), 3.0);
        assert_relative_eq!(jet.partial(0, 1, 0).unwrap(), 2.0);
        assert_relative_eq!(jet.partial(0, 0, 1).unwrap(), 1.0);
    }

    #[test]
    fn polynomial_anchor_matches_jets_module() {
        let ast = parse("x^2+b*y^2").unwrap();
        let jet = ast.eval_jet(1.0, 2.0, 3.0, 2, &BTreeMap::new()).unwrap();
        assert_relative_eq!(jet.value(), 13.0);
        assert_relative_eq!(jet.partial(0, 1, 0).unwrap(), 12.0);
        assert_relative_eq!(jet.partial(0, 0, 1).unwrap(), 4.0);
    }

    #[test]
    fn unbound_constant_is_reported() {
        let ast = parse("x+c1").unwrap();
        match ast.eval_jet(1.0, 1.0, 1.0, 1, &BTreeMap::new()) {
            Err(EvalError::UnboundConstant(name)) => assert_eq!(name, "c1"),
            other => panic!("expected UnboundConstant, got {other:?}"),
        }
    }

    #[test]
    fn print_parse_roundtrip() {
        for text in [
            "1+2*3",
            "-x^2+y/(b-1)",
            "(x^2+y^2)*(1+e*cos(b*(atan2(y,x)-th0)))^2",
            "pow(x,3)-sqrt(y)*exp(-b)",
            "x/(y*b)-tan(x)/atan(y)",
            "x^-2",
            "-(x+y)",
        ] {
            let once = parse(text).unwrap();
            let printed = once.to_string();
            let twice = parse(&printed).unwrap_or_else(|e| panic!("reparse of `{printed}`: {e}"));
            assert_eq!(once, twice, "round trip failed for `{text}` -> `{printed}`");
        }
    }

    #[test]
    fn order_zero_eval_matches_f64() {
        let cs = consts(&[("k", 0.7)]);
        for text in [
            "sin(x)*cos(y)+exp(b/4)",
            "sqrt(x^2+y^2)-log(x+3)",
            "atan2(y,x)*k-tan(b/2)",
        ] {
            let ast = parse(text).unwrap();
            let direct = ast.eval_f64(1.3, 2.1, 0.9, &cs).unwrap();
            let jet = ast.eval_jet(1.3, 2.1, 0.9, 0, &cs).unwrap();
            assert_relative_eq!(jet.value(), direct, max_relative = 1e-15);
        }
    }
}
