//! Scalar field abstraction.
//!
//! Every structure in the crate is generic over a [`Scalar`]. A single run
//! picks one concrete type, so mixing modes is a type error rather than a
//! runtime surprise. Three implementations are provided:
//!
//! * `f64`: IEEE-754 binary64.
//! * [`Rational`]: arbitrary-precision rationals, always in lowest terms.
//! * [`Mod61`]: exact arithmetic in the prime field of order 2^61 − 1. It is
//!   used for long-horizon exact identity checks where rational heights grow
//!   too quickly to be practical.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Which concrete scalar a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Double,
    Rational,
    PrimeField,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarMode::Double => "double",
            ScalarMode::Rational => "rational",
            ScalarMode::PrimeField => "prime-field",
        })
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(ScalarMode::Double),
            "rational" => Ok(ScalarMode::Rational),
            "prime-field" | "primefield" => Ok(ScalarMode::PrimeField),
            other => Err(Error::Malformed(format!("unknown scalar mode {other:?}"))),
        }
    }
}

/// Numeric field used by every polynomial, form and map in the crate.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;
    const MODE: ScalarMode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Image of an exact rational. Fails only in the prime field when the
    /// denominator is divisible by the modulus.
    fn from_rational(r: &Rational) -> Result<Self>;

    /// Image of a binary64 value. Rational conversion is exact.
    fn from_f64(v: f64) -> Result<Self>;

    /// Nearest binary64 value, when the mode has an ordering on the reals.
    fn to_f64(&self) -> Option<f64>;

    /// Parses a single coefficient from its text form.
    fn parse_str(s: &str) -> Result<Self>;

    /// Lossless text form (`"p/q"` for rationals, shortest round-trip
    /// decimal for doubles).
    fn to_text(&self) -> String;

    fn solve_system(a: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        linalg::gauss_solve(a, b)
    }

    fn determinant(a: &Matrix<Self>) -> Self {
        linalg::gauss_det(a)
    }

    /// Parses a coefficient given as a JSON number or string.
    fn parse_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => Self::parse_str(s),
            Value::Number(num) => {
                if let Some(i) = num.as_i64() {
                    Ok(Self::from_i64(i))
                } else if Self::EXACT {
                    Err(Error::MixedMode(format!(
                        "floating-point literal {num} in an exact mode; write it as a \"p/q\" string"
                    )))
                } else {
                    num.as_f64()
                        .ok_or_else(|| Error::InvalidCoefficient(num.to_string()))
                        .and_then(Self::from_f64)
                }
            }
            other => Err(Error::InvalidCoefficient(other.to_string())),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_text())
    }

    /// Absolute value as a double, used for residuals and pivoting.
    /// Prime-field values report 0 for zero and 1 otherwise.
    fn magnitude(&self) -> f64 {
        match self.to_f64() {
            Some(v) => v.abs(),
            None => {
                if self.is_zero() {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    fn pow_u32(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: ScalarMode = ScalarMode::Double;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Result<Self> {
        ToPrimitive::to_f64(r).ok_or_else(|| Error::InvalidCoefficient(r.to_string()))
    }

    fn from_f64(v: f64) -> Result<Self> {
        Ok(v)
    }

    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }

    fn parse_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') {
            return Err(Error::MixedMode(format!(
                "rational literal {t:?} in double mode"
            )));
        }
        t.parse::<f64>()
            .map_err(|_| Error::InvalidCoefficient(s.to_string()))
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(self.to_text()))
    }

    fn solve_system(a: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        linalg::lu_solve(a, b)
    }

    fn determinant(a: &Matrix<Self>) -> Self {
        linalg::lu_det(a)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: ScalarMode = ScalarMode::Rational;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Result<Self> {
        Ok(r.clone())
    }

    fn from_f64(v: f64) -> Result<Self> {
        Rational::from_float(v).ok_or_else(|| Error::InvalidCoefficient(v.to_string()))
    }

    fn to_f64(&self) -> Option<f64> {
        ToPrimitive::to_f64(self)
    }

    fn parse_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn solve_system(a: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        linalg::bareiss_solve(a, b)
    }

    fn determinant(a: &Matrix<Self>) -> Self {
        linalg::bareiss_det(a)
    }
}

/// Parses `"p"`, `"p/q"` or an exact decimal such as `"-1.25e-3"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidCoefficient(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let num = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Ok(i) = BigInt::from_str(t) {
        return Ok(Rational::from_integer(i));
    }
    // exact decimal literal
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(&digits).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Element of the prime field Z/pZ with p = 2^61 − 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mod61(u64);

impl Mod61 {
    pub const MODULUS: u64 = (1u64 << 61) - 1;

    pub fn new(v: u64) -> Self {
        Mod61(v % Self::MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce128(v: u128) -> u64 {
        let p = Self::MODULUS as u128;
        let folded = (v & p) + (v >> 61);
        let folded = (folded & p) + (folded >> 61);
        let r = folded as u64;
        if r >= Self::MODULUS {
            r - Self::MODULUS
        } else {
            r
        }
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Mod61(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inverse(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(Self::MODULUS - 2))
        }
    }

    fn from_bigint(v: &BigInt) -> Self {
        let p = BigInt::from(Self::MODULUS);
        let r = v.mod_floor(&p);
        Mod61(r.to_u64().expect("reduced residue fits in u64"))
    }
}

impl fmt::Debug for Mod61 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^61-1)", self.0)
    }
}

impl fmt::Display for Mod61 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Mod61 {
    type Output = Mod61;
    fn add(self, rhs: Mod61) -> Mod61 {
        let s = self.0 + rhs.0;
        Mod61(if s >= Self::MODULUS { s - Self::MODULUS } else { s })
    }
}

impl Sub for Mod61 {
    type Output = Mod61;
    fn sub(self, rhs: Mod61) -> Mod61 {
        if self.0 >= rhs.0 {
            Mod61(self.0 - rhs.0)
        } else {
            Mod61(self.0 + Self::MODULUS - rhs.0)
        }
    }
}

impl Mul for Mod61 {
    type Output = Mod61;
    fn mul(self, rhs: Mod61) -> Mod61 {
        Mod61(Self::reduce128(self.0 as u128 * rhs.0 as u128))
    }
}

impl Div for Mod61 {
    type Output = Mod61;
    fn div(self, rhs: Mod61) -> Mod61 {
        self * rhs.inverse().expect("division by zero in Z/(2^61-1)")
    }
}

impl Neg for Mod61 {
    type Output = Mod61;
    fn neg(self) -> Mod61 {
        Mod61(0) - self
    }
}

impl Zero for Mod61 {
    fn zero() -> Self {
        Mod61(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Mod61 {
    fn one() -> Self {
        Mod61(1)
    }
}

impl Scalar for Mod61 {
    const EXACT: bool = true;
    const MODE: ScalarMode = ScalarMode::PrimeField;

    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Mod61::new(v as u64)
        } else {
            -Mod61::new(v.unsigned_abs())
        }
    }

    fn from_rational(r: &Rational) -> Result<Self> {
        let den = Mod61::from_bigint(r.denom());
        let inv = den.inverse().ok_or_else(|| {
            Error::InvalidCoefficient(format!("{r} has a denominator divisible by 2^61-1"))
        })?;
        Ok(Mod61::from_bigint(r.numer()) * inv)
    }

    fn from_f64(v: f64) -> Result<Self> {
        let r = Rational::from_float(v).ok_or_else(|| Error::InvalidCoefficient(v.to_string()))?;
        Self::from_rational(&r)
    }

    fn to_f64(&self) -> Option<f64> {
        None
    }

    fn parse_str(s: &str) -> Result<Self> {
        Self::from_rational(&parse_rational(s)?)
    }

    fn to_text(&self) -> String {
        self.0.to_string()
    }

    fn solve_system(a: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        linalg::gauss_solve(a, b)
    }
}

/// log(max(|numerator|, denominator)) of a reduced rational.
pub fn log_height(r: &Rational) -> f64 {
    let n = r.numer().abs();
    let d = r.denom();
    let big = if &n > d { n } else { d.clone() };
    log_bigint(&big)
}

fn log_bigint(v: &BigInt) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits < 1000 {
        return ToPrimitive::to_f64(v).map(|x| x.abs().ln()).unwrap_or(f64::INFINITY);
    }
    // keep the leading 64 bits
    let shift = bits - 64;
    let lead = ToPrimitive::to_f64(&(v.abs() >> shift)).unwrap_or(f64::INFINITY);
    lead.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rational_parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("1.25").unwrap(), q(5, 4));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("1e3").unwrap(), q(1000, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rational_is_lowest_terms() {
        let r = q(14, -21);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(r.to_text(), "-2/3");
    }

    #[test]
    fn mixed_mode_rejected() {
        assert!(matches!(f64::parse_str("1/3"), Err(Error::MixedMode(_))));
        let v: Value = serde_json::json!(0.5);
        assert!(matches!(Rational::parse_json(&v), Err(Error::MixedMode(_))));
        assert_eq!(f64::parse_json(&v).unwrap(), 0.5);
        assert_eq!(Rational::parse_json(&serde_json::json!(7)).unwrap(), q(7, 1));
        assert_eq!(Rational::parse_json(&serde_json::json!("7/2")).unwrap(), q(7, 2));
    }

    #[test]
    fn double_text_round_trips() {
        for v in [0.1, -3.0, 1e-300, 123456.789] {
            assert_eq!(f64::parse_str(&v.to_text()).unwrap(), v);
        }
    }

    #[test]
    fn mod61_field_axioms() {
        let a = Mod61::from_i64(-5);
        let b = Mod61::from_i64(7);
        assert_eq!(a + Mod61::from_i64(5), Mod61::zero());
        assert_eq!((a * b) / b, a);
        assert_eq!(b * b.inverse().unwrap(), Mod61::one());
        let half = Mod61::from_rational(&q(1, 2)).unwrap();
        assert_eq!(half + half, Mod61::one());
        assert_eq!(Mod61::from_ratio(3, 4) * Mod61::from_i64(4), Mod61::from_i64(3));
    }

    #[test]
    fn heights() {
        assert_eq!(log_height(&q(1, 1)), 0.0);
        assert!((log_height(&q(-7, 3)) - 7f64.ln()).abs() < 1e-15);
        let big = Rational::from_integer(num_traits::pow(BigInt::from(3), 2000));
        assert!((log_height(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
