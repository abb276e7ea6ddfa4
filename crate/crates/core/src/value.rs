//! Length values that stay exact when the input is exact.
//!
//! A [`PiRat`] is `a + b*pi` with rational `a`, `b`; since pi is
//! transcendental the representation is unique, so equality and hashing are
//! decidable. A [`Value`] is either such an exact scalar or a plain `f64`.
//! Arithmetic keeps results exact whenever the operation stays linear in pi
//! and otherwise falls back to floating point.

use num::rational::Rational64;
use num::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Comparison tolerance for values that are only known numerically.
pub const NUMERIC_EPS: f64 = 1e-9;

/// Exact scalar of the form `rat + pi_coeff * pi`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PiRat {
    pub rat: Rational64,
    pub pi_coeff: Rational64,
}

impl PiRat {
    pub fn new(rat: Rational64, pi_coeff: Rational64) -> Self {
        PiRat { rat, pi_coeff }
    }

    pub fn from_int(n: i64) -> Self {
        PiRat::new(Rational64::from_integer(n), Rational64::zero())
    }

    pub fn from_rational(num: i64, den: i64) -> Self {
        PiRat::new(Rational64::new(num, den), Rational64::zero())
    }

    /// `coeff * pi`, e.g. `PiRat::pi(2)` is `2*pi`.
    pub fn pi(coeff: Rational64) -> Self {
        PiRat::new(Rational64::zero(), coeff)
    }

    pub fn zero() -> Self {
        PiRat::from_int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.pi_coeff.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.pi_coeff.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(self.rat) + rational_to_f64(self.pi_coeff) * std::f64::consts::PI
    }

    pub fn add(&self, other: &PiRat) -> PiRat {
        PiRat::new(self.rat + other.rat, self.pi_coeff + other.pi_coeff)
    }

    pub fn sub(&self, other: &PiRat) -> PiRat {
        PiRat::new(self.rat - other.rat, self.pi_coeff - other.pi_coeff)
    }

    pub fn neg(&self) -> PiRat {
        PiRat::new(-self.rat, -self.pi_coeff)
    }

    pub fn mul_rat(&self, q: Rational64) -> PiRat {
        PiRat::new(self.rat * q, self.pi_coeff * q)
    }

    /// Product, exact only while the result stays linear in pi.
    pub fn mul(&self, other: &PiRat) -> Option<PiRat> {
        if other.is_rational() {
            Some(self.mul_rat(other.rat))
        } else if self.is_rational() {
            Some(other.mul_rat(self.rat))
        } else {
            None
        }
    }

    pub fn div_rat(&self, q: Rational64) -> Option<PiRat> {
        if q.is_zero() {
            None
        } else {
            Some(self.mul_rat(q.recip()))
        }
    }
}

fn rational_to_f64(q: Rational64) -> f64 {
    q.to_f64()
        .unwrap_or_else(|| *q.numer() as f64 / *q.denom() as f64)
}

fn format_rational(q: Rational64) -> String {
    if q.denom() == &1 {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for PiRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pi_coeff.is_zero() {
            return write!(f, "{}", format_rational(self.rat));
        }
        let pi_part = if self.pi_coeff == Rational64::from_integer(1) {
            "pi".to_string()
        } else if self.pi_coeff == Rational64::from_integer(-1) {
            "-pi".to_string()
        } else {
            format!("{}*pi", format_rational(self.pi_coeff))
        };
        if self.rat.is_zero() {
            write!(f, "{}", pi_part)
        } else if self.pi_coeff.is_negative() {
            write!(f, "{} - {}", format_rational(self.rat), &pi_part[1..])
        } else {
            write!(f, "{} + {}", format_rational(self.rat), pi_part)
        }
    }
}

/// A length or threshold: exact when derivable by exact arithmetic from
/// exact inputs, otherwise a floating-point approximation.
///
/// `PartialEq` is structural (an `Exact` never equals an `Approx`); use
/// `same_as` for tolerance-aware comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Exact(PiRat),
    Approx(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(PiRat::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Value::Exact(PiRat::from_int(n))
    }

    pub fn from_rational(num: i64, den: i64) -> Self {
        Value::Exact(PiRat::from_rational(num, den))
    }

    pub fn pi_times(num: i64, den: i64) -> Self {
        Value::Exact(PiRat::pi(Rational64::new(num, den)))
    }

    pub fn approx(x: f64) -> Self {
        Value::Approx(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<PiRat> {
        match self {
            Value::Exact(p) => Some(*p),
            Value::Approx(_) => None,
        }
    }

    /// Exact rational content, if the value is exact and pi-free.
    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Value::Exact(p) if p.is_rational() => Some(p.rat),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(p) => p.to_f64(),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(p) => p.is_zero(),
            Value::Approx(x) => *x == 0.0,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a.add(b)),
            _ => Value::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a.sub(b)),
            _ => Value::Approx(self.to_f64() - other.to_f64()),
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a.neg()),
            Value::Approx(x) => Value::Approx(-x),
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => match a.mul(b) {
                Some(p) => Value::Exact(p),
                None => Value::Approx(a.to_f64() * b.to_f64()),
            },
            _ => Value::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn div(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) if b.is_rational() => match a.div_rat(b.rat) {
                Some(p) => Value::Exact(p),
                None => Value::Approx(f64::NAN),
            },
            _ => Value::Approx(self.to_f64() / other.to_f64()),
        }
    }

    pub fn mul_int(&self, n: i64) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a.mul_rat(Rational64::from_integer(n))),
            Value::Approx(x) => Value::Approx(x * n as f64),
        }
    }

    pub fn half(&self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a.mul_rat(Rational64::new(1, 2))),
            Value::Approx(x) => Value::Approx(x / 2.0),
        }
    }

    pub fn sqrt(&self) -> Value {
        // Exact only for perfect squares of nonnegative rationals.
        if let Some(q) = self.as_rational() {
            if !q.is_negative() {
                let (sn, sd) = (integer_sqrt(*q.numer()), integer_sqrt(*q.denom()));
                if let (Some(sn), Some(sd)) = (sn, sd) {
                    return Value::from_rational(sn, sd);
                }
            }
        }
        Value::Approx(self.to_f64().sqrt())
    }

    /// Total order: exact comparison when both sides are exact, floating
    /// point otherwise.
    pub fn cmp_val(&self, other: &Value) -> Ordering {
        if let (Value::Exact(a), Value::Exact(b)) = (self, other) {
            if a == b {
                return Ordering::Equal;
            }
        }
        self.to_f64()
            .partial_cmp(&other.to_f64())
            .unwrap_or(Ordering::Equal)
    }

    /// Equality for deduplication: exact when both sides are exact,
    /// within [`NUMERIC_EPS`] otherwise.
    pub fn same_as(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= NUMERIC_EPS,
        }
    }

    /// Strictly smaller, with the same exact/tolerant split as [`same_as`]:
    /// values within tolerance of each other are not strictly ordered.
    pub fn strictly_below(&self, other: &Value) -> bool {
        self.cmp_val(other) == std::cmp::Ordering::Less && !self.same_as(other)
    }

    /// Symbolic rendering when exact, decimal otherwise.
    pub fn display_symbolic(&self) -> String {
        match self {
            Value::Exact(p) => format!("{}", p),
            Value::Approx(x) => format!("{:.12}", x),
        }
    }

    /// Numeric rendering to 12 significant digits.
    pub fn display_numeric(&self) -> String {
        let x = self.to_f64();
        if x == 0.0 {
            "0".to_string()
        } else {
            format!("{:.*}", sig_decimals(x, 12), x)
        }
    }
}

fn sig_decimals(x: f64, sig: i32) -> usize {
    let mag = x.abs().log10().floor() as i32;
    (sig - 1 - mag).max(0) as usize
}

fn integer_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let s = (n as f64).sqrt().round() as i64;
    for c in [s - 1, s, s + 1] {
        if c >= 0 && c * c == n {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Value::pi_times(2, 1); // 2*pi
        let b = Value::pi_times(1, 3); // pi/3
        let sum = a.add(&b);
        assert!(sum.is_exact());
        assert!(sum.same_as(&Value::pi_times(7, 3)));
        assert!((sum.to_f64() - 7.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn pi_squared_degrades_to_numeric() {
        let p = Value::pi_times(1, 1);
        let sq = p.mul(&p);
        assert!(!sq.is_exact());
        assert!((sq.to_f64() - std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn ordering_uses_exact_ties() {
        let a = Value::from_rational(1, 3);
        let b = Value::from_rational(1, 3);
        assert_eq!(a.cmp_val(&b), Ordering::Equal);
        let c = Value::pi_times(1, 1);
        let d = Value::from_int(3);
        assert_eq!(d.cmp_val(&c), Ordering::Less);
    }

    #[test]
    fn sqrt_exact_on_perfect_squares() {
        assert!(Value::from_rational(9, 4).sqrt().same_as(&Value::from_rational(3, 2)));
        assert!(!Value::from_int(2).sqrt().is_exact());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Value::pi_times(2, 1).display_symbolic(), "2*pi");
        assert_eq!(Value::pi_times(-1, 1).display_symbolic(), "-pi");
        assert_eq!(Value::from_rational(3, 2).display_symbolic(), "3/2");
        let mixed = Value::from_int(1).add(&Value::pi_times(1, 2));
        assert_eq!(mixed.display_symbolic(), "1 + 1/2*pi");
        assert_eq!(Value::from_int(0).display_numeric(), "0");
    }
}
