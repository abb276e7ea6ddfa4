//! Arithmetic expressions in one variable `r`.
//!
//! Used for edge lengths (constant expressions, folded to exact values when
//! possible) and warp functions (evaluated pointwise, differentiated
//! symbolically). Grammar: `+ - * / ^`, unary minus, parentheses, decimal
//! and rational literals, `pi`, the variable `r`, and the functions
//! `exp`, `cos`, `sin`, `sqrt`, `cosh`, `sinh`, `tanh`.

use crate::value::Value;
use num::rational::Rational64;
use num::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdent(String),
    #[error("variable `r` is not allowed here")]
    VariableNotAllowed,
    #[error("cannot differentiate a power with a non-constant exponent")]
    NonConstantExponent,
    #[error("numeric literal out of range")]
    LiteralOverflow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational64),
    Pi,
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Cos(Box<Expr>),
    Sin(Box<Expr>),
    Sqrt(Box<Expr>),
    Cosh(Box<Expr>),
    Sinh(Box<Expr>),
    Tanh(Box<Expr>),
}

use Expr::*;

impl Expr {
    pub fn parse(src: &str, allow_var: bool) -> Result<Expr, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, allow_var };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(ExprError::Parse {
                pos: p.tokens[p.pos].1,
                msg: "unexpected trailing input".into(),
            });
        }
        Ok(e)
    }

    pub fn num(n: i64) -> Expr {
        Num(Rational64::from_integer(n))
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Num(q) => *q.numer() as f64 / *q.denom() as f64,
            Pi => std::f64::consts::PI,
            Var => r,
            Add(a, b) => a.eval(r) + b.eval(r),
            Sub(a, b) => a.eval(r) - b.eval(r),
            Mul(a, b) => a.eval(r) * b.eval(r),
            Div(a, b) => a.eval(r) / b.eval(r),
            Pow(a, b) => {
                let base = a.eval(r);
                let e = b.eval(r);
                if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                    base.powi(e as i32)
                } else {
                    base.powf(e)
                }
            }
            Neg(a) => -a.eval(r),
            Exp(a) => a.eval(r).exp(),
            Cos(a) => a.eval(r).cos(),
            Sin(a) => a.eval(r).sin(),
            Sqrt(a) => a.eval(r).sqrt(),
            Cosh(a) => a.eval(r).cosh(),
            Sinh(a) => a.eval(r).sinh(),
            Tanh(a) => a.eval(r).tanh(),
        }
    }

    /// Fold a variable-free expression to a `Value`, staying exact for
    /// rational/pi-linear arithmetic and falling back to floats elsewhere.
    pub fn const_value(&self) -> Option<Value> {
        match self {
            Num(q) => Some(Value::from_rational(*q.numer(), *q.denom())),
            Pi => Some(Value::pi_times(1, 1)),
            Var => None,
            Add(a, b) => Some(a.const_value()?.add(&b.const_value()?)),
            Sub(a, b) => Some(a.const_value()?.sub(&b.const_value()?)),
            Mul(a, b) => Some(a.const_value()?.mul(&b.const_value()?)),
            Div(a, b) => {
                let d = b.const_value()?;
                if d.is_zero() {
                    return None;
                }
                Some(a.const_value()?.div(&d))
            }
            Pow(a, b) => {
                let base = a.const_value()?;
                let e = b.const_value()?;
                if let Some(q) = e.as_rational() {
                    if q.is_integer() {
                        let n = *q.numer();
                        if (-16..=16).contains(&n) {
                            let mut acc = Value::from_int(1);
                            for _ in 0..n.unsigned_abs() {
                                acc = acc.mul(&base);
                            }
                            if n >= 0 {
                                return Some(acc);
                            }
                            if !acc.is_zero() {
                                return Some(Value::from_int(1).div(&acc));
                            }
                        }
                    }
                }
                Some(Value::approx(self.eval(0.0)))
            }
            Neg(a) => Some(a.const_value()?.neg()),
            Sqrt(a) => Some(a.const_value()?.sqrt()),
            Exp(a) | Cos(a) | Sin(a) | Cosh(a) | Sinh(a) | Tanh(a) => {
                let inner = a.const_value()?;
                let x = inner.to_f64();
                let y = match self {
                    Exp(_) => x.exp(),
                    Cos(_) => x.cos(),
                    Sin(_) => x.sin(),
                    Cosh(_) => x.cosh(),
                    Sinh(_) => x.sinh(),
                    _ => x.tanh(),
                };
                // exp(0), cos(0), cosh(0) are exactly 1; sin(0), sinh(0), tanh(0) exactly 0.
                if inner.is_zero() {
                    return Some(Value::from_int(if y == 1.0 { 1 } else { 0 }));
                }
                Some(Value::approx(y))
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Var => false,
            Num(_) | Pi => true,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Neg(a) | Exp(a) | Cos(a) | Sin(a) | Sqrt(a) | Cosh(a) | Sinh(a) | Tanh(a) => {
                a.is_constant()
            }
        }
    }

    /// Symbolic derivative with respect to `r`. Powers require a constant
    /// exponent.
    pub fn derivative(&self) -> Result<Expr, ExprError> {
        let d = match self {
            Num(_) | Pi => Expr::num(0),
            Var => Expr::num(1),
            Add(a, b) => Add(Box::new(a.derivative()?), Box::new(b.derivative()?)),
            Sub(a, b) => Sub(Box::new(a.derivative()?), Box::new(b.derivative()?)),
            Mul(a, b) => Add(
                Box::new(Mul(Box::new(a.derivative()?), b.clone())),
                Box::new(Mul(a.clone(), Box::new(b.derivative()?))),
            ),
            Div(a, b) => Div(
                Box::new(Sub(
                    Box::new(Mul(Box::new(a.derivative()?), b.clone())),
                    Box::new(Mul(a.clone(), Box::new(b.derivative()?))),
                )),
                Box::new(Pow(b.clone(), Box::new(Expr::num(2)))),
            ),
            Pow(a, b) => {
                if !b.is_constant() {
                    return Err(ExprError::NonConstantExponent);
                }
                // c * a^(c-1) * a'
                Mul(
                    Box::new(Mul(
                        b.clone(),
                        Box::new(Pow(a.clone(), Box::new(Sub(b.clone(), Box::new(Expr::num(1)))))),
                    )),
                    Box::new(a.derivative()?),
                )
            }
            Neg(a) => Neg(Box::new(a.derivative()?)),
            Exp(a) => Mul(Box::new(Exp(a.clone())), Box::new(a.derivative()?)),
            Cos(a) => Neg(Box::new(Mul(Box::new(Sin(a.clone())), Box::new(a.derivative()?)))),
            Sin(a) => Mul(Box::new(Cos(a.clone())), Box::new(a.derivative()?)),
            Sqrt(a) => Div(
                Box::new(a.derivative()?),
                Box::new(Mul(Box::new(Expr::num(2)), Box::new(Sqrt(a.clone())))),
            ),
            Cosh(a) => Mul(Box::new(Sinh(a.clone())), Box::new(a.derivative()?)),
            Sinh(a) => Mul(Box::new(Cosh(a.clone())), Box::new(a.derivative()?)),
            Tanh(a) => Div(
                Box::new(a.derivative()?),
                Box::new(Pow(Box::new(Cosh(a.clone())), Box::new(Expr::num(2)))),
            ),
        };
        Ok(d.simplify())
    }

    /// Constant folding over rationals plus unit identities. Keeps `pi`
    /// symbolic.
    pub fn simplify(&self) -> Expr {
        match self {
            Num(_) | Pi | Var => self.clone(),
            Add(a, b) => match (a.simplify(), b.simplify()) {
                (Num(x), Num(y)) => Num(x + y),
                (x, Num(z)) if z.is_zero() => x,
                (Num(z), y) if z.is_zero() => y,
                (x, y) => Add(Box::new(x), Box::new(y)),
            },
            Sub(a, b) => match (a.simplify(), b.simplify()) {
                (Num(x), Num(y)) => Num(x - y),
                (x, Num(z)) if z.is_zero() => x,
                (Num(z), y) if z.is_zero() => Neg(Box::new(y)).simplify(),
                (x, y) => Sub(Box::new(x), Box::new(y)),
            },
            Mul(a, b) => match (a.simplify(), b.simplify()) {
                (Num(x), Num(y)) => Num(x * y),
                (Num(z), _) | (_, Num(z)) if z.is_zero() => Expr::num(0),
                (x, Num(o)) if o.is_one() => x,
                (Num(o), y) if o.is_one() => y,
                (x, y) => Mul(Box::new(x), Box::new(y)),
            },
            Div(a, b) => match (a.simplify(), b.simplify()) {
                (Num(x), Num(y)) if !y.is_zero() => Num(x / y),
                (x, Num(o)) if o.is_one() => x,
                (Num(z), y) if z.is_zero() && !matches!(y, Num(q) if q.is_zero()) => Expr::num(0),
                (x, y) => Div(Box::new(x), Box::new(y)),
            },
            Pow(a, b) => match (a.simplify(), b.simplify()) {
                (_, Num(z)) if z.is_zero() => Expr::num(1),
                (x, Num(o)) if o.is_one() => x,
                (Num(x), Num(e)) if e.is_integer() && (0..=16).contains(e.numer()) => {
                    let mut acc = Rational64::one();
                    for _ in 0..*e.numer() {
                        acc *= x;
                    }
                    Num(acc)
                }
                (x, y) => Pow(Box::new(x), Box::new(y)),
            },
            Neg(a) => match a.simplify() {
                Num(x) => Num(-x),
                Neg(inner) => *inner,
                x => Neg(Box::new(x)),
            },
            Exp(a) => Exp(Box::new(a.simplify())),
            Cos(a) => Cos(Box::new(a.simplify())),
            Sin(a) => Sin(Box::new(a.simplify())),
            Sqrt(a) => Sqrt(Box::new(a.simplify())),
            Cosh(a) => Cosh(Box::new(a.simplify())),
            Sinh(a) => Sinh(Box::new(a.simplify())),
            Tanh(a) => Tanh(Box::new(a.simplify())),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(..) => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < parent;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Num(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())?;
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())?;
                }
            }
            Pi => write!(f, "pi")?,
            Var => write!(f, "r")?,
            Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            Pow(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^")?;
                b.fmt_prec(f, 4)?;
            }
            Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)?;
            }
            Exp(a) | Cos(a) | Sin(a) | Sqrt(a) | Cosh(a) | Sinh(a) | Tanh(a) => {
                let name = match self {
                    Exp(_) => "exp",
                    Cos(_) => "cos",
                    Sin(_) => "sin",
                    Sqrt(_) => "sqrt",
                    Cosh(_) => "cosh",
                    Sinh(_) => "sinh",
                    _ => "tanh",
                };
                write!(f, "{name}(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Parse a constant expression to an exact-when-possible positive length.
pub fn parse_length(src: &str) -> Result<Value, ExprError> {
    let e = Expr::parse(src, false)?;
    let v = e.const_value().ok_or_else(|| ExprError::Parse {
        pos: 0,
        msg: format!("`{src}` does not fold to a constant"),
    })?;
    if v.to_f64() <= 0.0 || !v.to_f64().is_finite() {
        return Err(ExprError::Parse { pos: 0, msg: format!("`{src}` is not a positive length") });
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    HalfLine,
    FullLine,
}

/// A warp function `f(r)` with its first two symbolic derivatives, the
/// coefficient of the fiber metric in `a(r)^2 dr^2 + f(r)^2 dy^2`.
#[derive(Debug, Clone)]
pub struct WarpFunction {
    pub source: String,
    pub expr: Expr,
    pub d1: Expr,
    pub d2: Expr,
    pub domain: Domain,
}

impl WarpFunction {
    pub fn parse(src: &str, domain: Domain) -> Result<WarpFunction, ExprError> {
        let expr = Expr::parse(src, true)?.simplify();
        let d1 = expr.derivative()?;
        let d2 = d1.derivative()?;
        Ok(WarpFunction { source: src.to_string(), expr, d1, d2, domain })
    }

    pub fn from_expr(source: &str, expr: Expr, domain: Domain) -> Result<WarpFunction, ExprError> {
        let expr = expr.simplify();
        let d1 = expr.derivative()?;
        let d2 = d1.derivative()?;
        Ok(WarpFunction { source: source.to_string(), expr, d1, d2, domain })
    }

    pub fn f(&self, r: f64) -> f64 {
        self.expr.eval(r)
    }

    pub fn df(&self, r: f64) -> f64 {
        self.d1.eval(r)
    }

    pub fn ddf(&self, r: f64) -> f64 {
        self.d2.eval(r)
    }

    /// Check `f > 0` on a sample grid over `[lo, hi]`.
    pub fn check_positive(&self, lo: f64, hi: f64, samples: usize) -> Result<(), ExprError> {
        for i in 0..=samples {
            let r = lo + (hi - lo) * i as f64 / samples as f64;
            let v = self.f(r);
            if !(v > 0.0) || !v.is_finite() {
                return Err(ExprError::Parse {
                    pos: 0,
                    msg: format!("warp function `{}` is not positive at r = {r}", self.source),
                });
            }
        }
        Ok(())
    }
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    allow_var: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                let mut int_part: i64 = 0;
                let mut frac_num: i64 = 0;
                let mut frac_den: i64 = 1;
                let mut seen_dot = false;
                let mut seen_digit = false;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_digit() {
                        seen_digit = true;
                        let digit = (d as u8 - b'0') as i64;
                        if seen_dot {
                            frac_num = frac_num
                                .checked_mul(10)
                                .and_then(|v| v.checked_add(digit))
                                .ok_or(ExprError::LiteralOverflow)?;
                            frac_den = frac_den.checked_mul(10).ok_or(ExprError::LiteralOverflow)?;
                        } else {
                            int_part = int_part
                                .checked_mul(10)
                                .and_then(|v| v.checked_add(digit))
                                .ok_or(ExprError::LiteralOverflow)?;
                        }
                        i += 1;
                    } else if d == '.' && !seen_dot {
                        seen_dot = true;
                        i += 1;
                    } else {
                        break;
                    }
                }
                if !seen_digit {
                    return Err(ExprError::Parse { pos: start, msg: "bare `.`".into() });
                }
                let q = Rational64::from_integer(int_part) + Rational64::new(frac_num, frac_den);
                out.push((Tok::Num(q), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ExprError::Parse { pos: i, msg: format!("unexpected character `{c}`") })
            }
        }
    }
    Ok(out)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, p)| *p).unwrap_or(usize::MAX)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.term()?;
        while let Some(op) = self.peek() {
            let op = match op {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            e = if op { Add(Box::new(e), Box::new(rhs)) } else { Sub(Box::new(e), Box::new(rhs)) };
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.unary()?;
        while let Some(op) = self.peek() {
            let op = match op {
                Tok::Star => true,
                Tok::Slash => false,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            e = if op { Mul(Box::new(e), Box::new(rhs)) } else { Div(Box::new(e), Box::new(rhs)) };
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let exp = self.unary()?;
            return Ok(Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(q)) => Ok(Num(q)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(ExprError::Parse { pos, msg: "unmatched `(`".into() }),
                }
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "pi" => Ok(Pi),
                "r" => {
                    if self.allow_var {
                        Ok(Var)
                    } else {
                        Err(ExprError::VariableNotAllowed)
                    }
                }
                "exp" | "cos" | "sin" | "sqrt" | "cosh" | "sinh" | "tanh" => {
                    if self.bump() != Some(Tok::LParen) {
                        return Err(ExprError::Parse {
                            pos,
                            msg: format!("`{name}` needs parentheses"),
                        });
                    }
                    let arg = Box::new(self.expr()?);
                    if self.bump() != Some(Tok::RParen) {
                        return Err(ExprError::Parse { pos, msg: "unmatched `(`".into() });
                    }
                    Ok(match name.as_str() {
                        "exp" => Exp(arg),
                        "cos" => Cos(arg),
                        "sin" => Sin(arg),
                        "sqrt" => Sqrt(arg),
                        "cosh" => Cosh(arg),
                        "sinh" => Sinh(arg),
                        _ => Tanh(arg),
                    })
                }
                _ => Err(ExprError::UnknownIdent(name)),
            },
            _ => Err(ExprError::Parse { pos, msg: "expected an expression".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Expr {
        Expr::parse(s, true).unwrap()
    }

    #[test]
    fn parses_and_evaluates() {
        assert_eq!(parse("1 + 2*3").eval(0.0), 7.0);
        assert_eq!(parse("2^3^2").eval(0.0), 512.0); // right associative
        assert_eq!(parse("-2^2").eval(0.0), -4.0); // unary minus binds looser
        assert_eq!(parse("r^-1").eval(4.0), 0.25);
        assert!((parse("2*pi").eval(0.0) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(parse("1.25 * 4").eval(0.0), 5.0);
        let f = parse("1 + exp(-r^2)");
        assert!((f.eval(1.0) - (1.0 + (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn const_folding_is_exact_where_possible() {
        let v = Expr::parse("2*pi", false).unwrap().const_value().unwrap();
        assert!(v.is_exact());
        assert_eq!(v, Value::pi_times(2, 1));
        let v = Expr::parse("3/2 + 1/2", false).unwrap().const_value().unwrap();
        assert_eq!(v, Value::from_int(2));
        let v = Expr::parse("sqrt(9/4)", false).unwrap().const_value().unwrap();
        assert_eq!(v, Value::from_rational(3, 2));
        let v = Expr::parse("2*pi/2^3", false).unwrap().const_value().unwrap();
        assert_eq!(v, Value::pi_times(1, 4));
        // pi^2 cannot stay exact.
        let v = Expr::parse("pi^2", false).unwrap().const_value().unwrap();
        assert!(!v.is_exact());
        assert!((v.to_f64() - std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn lengths_must_be_positive_constants() {
        assert!(parse_length("2*pi").is_ok());
        assert!(parse_length("0").is_err());
        assert!(parse_length("1 - 2").is_err());
        assert!(matches!(parse_length("r + 1"), Err(ExprError::VariableNotAllowed)));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for src in ["1 + exp(-r^2)", "sqrt(r^2 + 1)", "exp(r)", "r^3 - 2*r + 1/2", "1/(1+r^2)", "cosh(r)*tanh(r)", "sin(2*r) + cos(r/2)"] {
            let wf = WarpFunction::parse(src, Domain::FullLine).unwrap();
            for &r in &[0.1, 0.7, 1.3, 2.9] {
                let h = 1e-5;
                let fd1 = (wf.f(r + h) - wf.f(r - h)) / (2.0 * h);
                let fd2 = (wf.f(r + h) - 2.0 * wf.f(r) + wf.f(r - h)) / (h * h);
                assert!(
                    (wf.df(r) - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()),
                    "{src} d1 at {r}: {} vs {}",
                    wf.df(r),
                    fd1
                );
                assert!(
                    (wf.ddf(r) - fd2).abs() <= 1e-4 * (1.0 + fd2.abs()),
                    "{src} d2 at {r}: {} vs {}",
                    wf.ddf(r),
                    fd2
                );
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for src in ["1 + exp(-r^2)", "(r + 1)*(r - 1)", "2*pi/2^3", "sqrt(r^2 + 1)/r", "-(r + 1)^2"] {
            let e = parse(src);
            let printed = e.to_string();
            let reparsed = Expr::parse(&printed, true).unwrap();
            assert_eq!(e, reparsed, "{src} -> {printed}");
        }
    }

    #[test]
    fn simplify_cleans_derivative_noise() {
        let e = parse("r^2").derivative().unwrap();
        // d/dr r^2 = 2 * r^1 * 1 simplifies to 2*r.
        assert_eq!(e, Mul(Box::new(Expr::num(2)), Box::new(Var)));
        let zero = parse("pi").derivative().unwrap();
        assert_eq!(zero, Expr::num(0));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Expr::parse("q + 1", true), Err(ExprError::UnknownIdent(_))));
        assert!(Expr::parse("(1 + 2", true).is_err());
        assert!(Expr::parse("1 +", true).is_err());
        assert!(Expr::parse("r", false).is_err());
        assert!(Expr::parse("1 2", true).is_err());
    }

    #[test]
    fn positivity_grid() {
        let ok = WarpFunction::parse("1 + exp(-r^2)", Domain::FullLine).unwrap();
        assert!(ok.check_positive(-10.0, 10.0, 200).is_ok());
        let bad = WarpFunction::parse("1 - r", Domain::HalfLine).unwrap();
        assert!(bad.check_positive(0.0, 2.0, 10).is_err());
    }
}
