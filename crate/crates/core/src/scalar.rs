//! Real parameters that stay exact while they can.
//!
//! Witness and state parameters (α, β, λ, a) are rationals in every closed
//! form this crate uses. [`Scalar`] keeps them as `i128` ratios so interval
//! boundaries such as α = 3/8 or β = 1 compare exactly, and degrades to `f64`
//! only when an input is genuinely real or an operation would overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, Copy)]
pub enum Scalar {
    Exact(Rational),
    Real(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(Rational::from_integer(n as i128))
    }

    /// `num/den`; panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(Rational::new(num as i128, den as i128))
    }

    pub fn real(x: f64) -> Self {
        Scalar::Real(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Exact(r) => Some(*r),
            Scalar::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => ratio_to_f64(r),
            Scalar::Real(x) => *x,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Real(x) => x.is_finite(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Real(x) => *x == 0.0,
        }
    }

    /// `self >= other`, exactly for two exact values, otherwise with slack `tol`.
    pub fn ge_tol(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a >= b,
            _ => self.to_f64() >= other.to_f64() - tol,
        }
    }

    /// `self < other`, exactly for two exact values; a real value within `tol`
    /// of `other` counts as equal and therefore not less.
    pub fn lt_tol(&self, other: &Scalar, tol: f64) -> bool {
        !self.ge_tol(other, tol)
    }

    /// `self <= other` (exact, or with slack `tol`).
    pub fn le_tol(&self, other: &Scalar, tol: f64) -> bool {
        other.ge_tol(self, tol)
    }

    /// `self > other` (exact, or requiring a margin of `tol`).
    pub fn gt_tol(&self, other: &Scalar, tol: f64) -> bool {
        !self.le_tol(other, tol)
    }
}

fn ratio_to_f64(r: &Rational) -> f64 {
    // numer/denom separately keeps the correctly rounded result for small values
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) => n / d,
        _ => f64::NAN,
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident, $op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                if let (Scalar::Exact(a), Scalar::Exact(b)) = (&self, &rhs) {
                    if let Some(v) = a.$checked(b) {
                        return Scalar::Exact(v);
                    }
                }
                Scalar::Real(self.to_f64() $op rhs.to_f64())
            }
        }
    };
}

scalar_binop!(Add, add, checked_add, +);
scalar_binop!(Sub, sub, checked_sub, -);
scalar_binop!(Mul, mul, checked_mul, *);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (&self, &rhs) {
            if !b.is_zero() {
                if let Some(v) = a.checked_div(b) {
                    return Scalar::Exact(v);
                }
            }
        }
        Scalar::Real(self.to_f64() / rhs.to_f64())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Real(x) => Scalar::Real(-x),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<usize> for Scalar {
    fn from(n: usize) -> Self {
        Scalar::Exact(Rational::from_integer(n as i128))
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `"p/q"`, integers, and decimal literals (`"0.375"`, `"1e-3"`).
/// Decimal literals are read as the exact rational they denote.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: i128 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(Rational::new(p, q)));
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Scalar::Exact(r));
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("non-finite number: {s:?}")));
        }
        Ok(Scalar::Real(x))
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let mut numer: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer.checked_mul(10)?.checked_add((b - b'0') as i128)?;
    }
    let scale = exp - frac_part.len() as i32;
    let pow = 10i128.checked_pow(scale.unsigned_abs())?;
    let r = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(pow)?)
    } else {
        Rational::new(numer, pow)
    };
    Some(if neg { -r } else { r })
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) if r.is_integer() => match r.numer().to_i64() {
                Some(n) => serializer.serialize_i64(n),
                None => serializer.serialize_str(&self.to_string()),
            },
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Real(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(Scalar::int(n)),
            // a JSON number literal is treated as the decimal it prints as
            Raw::Float(x) => Ok(format!("{x}").parse().unwrap_or(Scalar::Real(x))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
