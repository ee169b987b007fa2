//! A small arithmetic language for functions of `x1..xp`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' digits | func '(' expr ')' | '(' expr ')'
//! func    := exp | sin | cos | log | sqrt
//! ```
//!
//! Exponents must fold to integer constants. Decimal literals are read as
//! exact rationals. See `docs/dsl.md` for the full description.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::boxcalc::{DerivativeOracle, ExactFn, FieldSpec, RealFn};
use crate::coefficients::MultiIndex;
use crate::poly::Polynomial;
use crate::rational::{int, to_f64, Rational};

/// Largest accepted `|exponent|`.
pub const MAX_EXPONENT: i64 = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at byte {offset}")]
    UnexpectedChar { offset: usize, ch: char },
    #[error("unexpected {found} at byte {offset}, expected {expected}")]
    Unexpected {
        offset: usize,
        found: String,
        expected: String,
    },
    #[error("unknown identifier {name:?} at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("variable x{index} at byte {offset} is outside x1..x{p}")]
    VariableOutOfRange {
        offset: usize,
        index: usize,
        p: usize,
    },
    #[error("exponent at byte {offset} must be an integer constant with magnitude at most {MAX_EXPONENT}")]
    BadExponent { offset: usize },
    #[error("invalid number {text:?} at byte {offset}")]
    InvalidNumber { offset: usize, text: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnexpectedChar { offset, .. }
            | ParseError::Unexpected { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::VariableOutOfRange { offset, .. }
            | ParseError::BadExponent { offset }
            | ParseError::InvalidNumber { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in {expr}")]
    DivisionByZero { expr: String },
    #[error("log of nonpositive value {value} in {expr}")]
    LogDomain { expr: String, value: f64 },
    #[error("sqrt of negative value {value} in {expr}")]
    SqrtDomain { expr: String, value: f64 },
    #[error("non-finite value in {expr}")]
    NonFinite { expr: String },
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("{expr} has no exact rational value")]
    NotRational { expr: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A literal, kept exactly and as its nearest double.
    Num(Rational, f64),
    /// Zero-based variable index: `Var(0)` is `x1`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational, String),
    Ident(String),
    Sym(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value = parse_decimal(text).ok_or_else(|| ParseError::InvalidNumber {
                offset: start,
                text: text.to_string(),
            })?;
            out.push((start, Tok::Num(value, text.to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or(c);
            return Err(ParseError::UnexpectedChar { offset: i, ch });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

/// Exact value of a decimal literal such as `12`, `0.25` or `1.5e-3`.
fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(k) => (&text[..k], text[k + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (whole, frac) = match mantissa.split_once('.') {
        Some((w, f)) => (w, f),
        None => (mantissa, ""),
    };
    if whole.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let scale = exponent - frac.len() as i64;
    if scale.abs() > 4096 {
        return None;
    }
    let ten = Rational::from_integer(BigInt::from(10));
    let factor = if scale >= 0 {
        num_traits::pow(ten, scale as usize)
    } else {
        Rational::one() / num_traits::pow(ten, (-scale) as usize)
    };
    Some(Rational::from_integer(n) * factor)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    p: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(_, s) => format!("number {s}"),
        Tok::Ident(s) => format!("identifier {s:?}"),
        Tok::Sym(c) => format!("{c:?}"),
        Tok::End => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("{c:?}")))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Unexpected {
            offset: self.offset(),
            found: describe(self.peek()),
            expected: expected.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let offset = self.offset();
        let exponent = self.unary()?;
        let k = exponent
            .constant_value()
            .filter(|r| r.is_integer())
            .and_then(|r| r.to_integer().to_i64())
            .filter(|k| k.abs() <= MAX_EXPONENT)
            .ok_or(ParseError::BadExponent { offset })?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (offset, tok) = self.bump();
        match tok {
            Tok::Num(value, _) => Ok(Expr::num(value)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                let index = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| ParseError::UnknownIdentifier {
                        offset,
                        name: name.clone(),
                    })?;
                if index == 0 || index > self.p {
                    return Err(ParseError::VariableOutOfRange {
                        offset,
                        index,
                        p: self.p,
                    });
                }
                Ok(Expr::Var(index - 1))
            }
            other => Err(ParseError::Unexpected {
                offset,
                found: describe(&other),
                expected: "a number, variable, function or '('".into(),
            }),
        }
    }
}

/// Parses `src` as a function of `x1..xp`.
pub fn parse(src: &str, p: usize) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser { toks, pos: 0, p };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok(e)
}

fn finite(v: f64, e: &Expr) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite {
            expr: e.to_string(),
        })
    }
}

impl Expr {
    pub fn num(value: Rational) -> Expr {
        let approx = to_f64(&value);
        Expr::Num(value, approx)
    }

    /// Exact value when the expression contains no variables and no
    /// transcendental calls.
    pub fn constant_value(&self) -> Option<Rational> {
        self.eval_rational_inner(&[]).ok()
    }

    pub fn max_variable(&self) -> Option<usize> {
        match self {
            Expr::Num(..) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_variable(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_variable().max(b.max_variable())
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        if let Some(i) = self.max_variable() {
            if i >= x.len() {
                return Err(EvalError::Arity {
                    expected: i + 1,
                    got: x.len(),
                });
            }
        }
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(_, v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval_unchecked(x)?,
            Expr::Add(a, b) => a.eval_unchecked(x)? + b.eval_unchecked(x)?,
            Expr::Sub(a, b) => a.eval_unchecked(x)? - b.eval_unchecked(x)?,
            Expr::Mul(a, b) => a.eval_unchecked(x)? * b.eval_unchecked(x)?,
            Expr::Div(a, b) => {
                let d = b.eval_unchecked(x)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        expr: self.to_string(),
                    });
                }
                a.eval_unchecked(x)? / d
            }
            Expr::Pow(a, k) => {
                let base = a.eval_unchecked(x)?;
                if base == 0.0 && *k < 0 {
                    return Err(EvalError::DivisionByZero {
                        expr: self.to_string(),
                    });
                }
                base.powi(*k as i32)
            }
            Expr::Call(func, a) => {
                let v = a.eval_unchecked(x)?;
                match func {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(EvalError::LogDomain {
                                expr: self.to_string(),
                                value: v,
                            });
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(EvalError::SqrtDomain {
                                expr: self.to_string(),
                                value: v,
                            });
                        }
                        v.sqrt()
                    }
                }
            }
        };
        finite(v, self)
    }

    /// Exact evaluation for expressions built from literals, variables,
    /// `+ - * /` and integer powers.
    pub fn eval_rational(&self, x: &[Rational]) -> Result<Rational, EvalError> {
        if let Some(i) = self.max_variable() {
            if i >= x.len() {
                return Err(EvalError::Arity {
                    expected: i + 1,
                    got: x.len(),
                });
            }
        }
        self.eval_rational_inner(x)
    }

    fn eval_rational_inner(&self, x: &[Rational]) -> Result<Rational, EvalError> {
        Ok(match self {
            Expr::Num(v, _) => v.clone(),
            Expr::Var(i) => x.get(*i).cloned().ok_or_else(|| EvalError::NotRational {
                expr: self.to_string(),
            })?,
            Expr::Neg(a) => -a.eval_rational_inner(x)?,
            Expr::Add(a, b) => a.eval_rational_inner(x)? + b.eval_rational_inner(x)?,
            Expr::Sub(a, b) => a.eval_rational_inner(x)? - b.eval_rational_inner(x)?,
            Expr::Mul(a, b) => a.eval_rational_inner(x)? * b.eval_rational_inner(x)?,
            Expr::Div(a, b) => {
                let d = b.eval_rational_inner(x)?;
                if d.is_zero() {
                    return Err(EvalError::DivisionByZero {
                        expr: self.to_string(),
                    });
                }
                a.eval_rational_inner(x)? / d
            }
            Expr::Pow(a, k) => {
                let base = a.eval_rational_inner(x)?;
                if base.is_zero() && *k < 0 {
                    return Err(EvalError::DivisionByZero {
                        expr: self.to_string(),
                    });
                }
                let mag = num_traits::pow(base, k.unsigned_abs() as usize);
                if *k < 0 {
                    mag.recip()
                } else {
                    mag
                }
            }
            Expr::Call(..) => {
                return Err(EvalError::NotRational {
                    expr: self.to_string(),
                })
            }
        })
    }

    /// Syntactic polynomial test: no calls, divisions only by constants,
    /// negative powers only of constants.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Num(..) | Expr::Var(_) => true,
            Expr::Neg(a) => a.is_polynomial(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.is_polynomial() && b.is_polynomial()
            }
            Expr::Div(a, b) => a.is_polynomial() && b.max_variable().is_none() && b.is_polynomial(),
            Expr::Pow(a, k) => a.is_polynomial() && (*k >= 0 || a.max_variable().is_none()),
            Expr::Call(..) => false,
        }
    }

    /// Expands a polynomial expression in `p` variables.
    pub fn to_polynomial(&self, p: usize) -> Option<Polynomial> {
        if !self.is_polynomial() || self.max_variable().is_some_and(|i| i >= p) {
            return None;
        }
        self.expand(p)
    }

    fn expand(&self, p: usize) -> Option<Polynomial> {
        Some(match self {
            Expr::Num(v, _) => Polynomial::constant(p, v.clone()),
            Expr::Var(i) => {
                let mut e = vec![0; p];
                e[*i] = 1;
                Polynomial::monomial(e, int(1))
            }
            Expr::Neg(a) => a.expand(p)?.mul(&Polynomial::constant(p, int(-1))),
            Expr::Add(a, b) => a.expand(p)?.add(&b.expand(p)?),
            Expr::Sub(a, b) => a
                .expand(p)?
                .add(&b.expand(p)?.mul(&Polynomial::constant(p, int(-1)))),
            Expr::Mul(a, b) => a.expand(p)?.mul(&b.expand(p)?),
            Expr::Div(a, b) => {
                let d = b.constant_value().filter(|d| !d.is_zero())?;
                a.expand(p)?.mul(&Polynomial::constant(p, d.recip()))
            }
            Expr::Pow(a, k) => {
                if *k < 0 {
                    Polynomial::constant(p, self.constant_value()?)
                } else {
                    let base = a.expand(p)?;
                    (0..*k).fold(Polynomial::constant(p, int(1)), |acc, _| acc.mul(&base))
                }
            }
            Expr::Call(..) => return None,
        })
    }

    pub fn to_real_fn(&self) -> RealFn {
        let e = self.clone();
        Arc::new(move |x: &[f64]| e.eval(x).map_err(|err| err.to_string()))
    }

    pub fn to_exact_fn(&self) -> ExactFn {
        let e = self.clone();
        Arc::new(move |x: &[Rational]| e.eval_rational(x).map_err(|err| err.to_string()))
    }
}

/// Exact decimal form when the denominator divides a power of ten.
fn decimal_string(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut a, mut b) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        a += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        b += 1;
    }
    if !den.is_one() {
        return None;
    }
    let digits = a.max(b);
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer().abs();
    let mut s = n.to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        s.insert(s.len() - digits, '.');
    }
    Some(if r.is_negative() { format!("-{s}") } else { s })
}

impl fmt::Display for Expr {
    /// Fully parenthesized; reparsing gives back the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v, _) => match decimal_string(v) {
                Some(s) if v.is_negative() => write!(f, "({s})"),
                Some(s) => write!(f, "{s}"),
                None => write!(f, "({}/{})", v.numer(), v.denom()),
            },
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "({a} ^ {k})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Builds a [`FieldSpec`] from DSL expressions. Polynomial `f` gets exact
/// evaluation and all partial derivatives; polynomial `F` gets an exact
/// antiderivative path. `derivatives` supplies further partials by hand.
pub fn field_from_exprs(
    p: usize,
    f: &Expr,
    antiderivative: Option<&Expr>,
    derivatives: &[(MultiIndex, Expr)],
) -> FieldSpec {
    let mut field = FieldSpec::from_fn(p, f.to_real_fn());
    if let Some(big_f) = antiderivative {
        field = field.with_antiderivative_fn(big_f.to_real_fn());
    }
    let poly = f.to_polynomial(p);
    let supplied: Vec<(MultiIndex, RealFn)> = derivatives
        .iter()
        .map(|(a, e)| (a.clone(), e.to_real_fn()))
        .collect();
    if poly.is_some() || !supplied.is_empty() {
        let poly = poly.clone();
        let oracle: DerivativeOracle = Arc::new(move |alpha: &[usize]| {
            if let Some((_, d)) = supplied.iter().find(|(a, _)| a.as_slice() == alpha) {
                return Some(d.clone());
            }
            poly.as_ref().map(|q| q.derivative(alpha).to_real_fn())
        });
        field = field.with_derivatives(oracle);
    }
    if f.is_polynomial() {
        let exact_anti = antiderivative
            .filter(|e| e.is_polynomial())
            .map(|e| e.to_exact_fn());
        field = field.with_exact(f.to_exact_fn(), exact_anti);
    }
    field
}
