//! Exact rationals and the extended value `+∞` used for fees and costs.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Exact rational used for positions, probabilities and finite fees.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A rational number or `+∞`.
///
/// The derived ordering places every finite value below `Infinity`, and `+∞`
/// absorbs addition. There is no `-∞`: fees and costs are bounded below.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedRational {
    Finite(Rational),
    Infinity,
}

impl ExtendedRational {
    pub fn zero() -> Self {
        Self::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        Self::Finite(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::Finite(int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinity => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Finite(v) if v.is_zero())
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Self::Finite(v) if v.is_negative())
    }

    /// Multiplies by a non-negative scalar. `0 · ∞` is taken as `0`, which is
    /// the convention needed for zero-probability lottery entries.
    pub fn scale(&self, k: &Rational) -> Self {
        debug_assert!(!k.is_negative());
        match self {
            Self::Finite(v) => Self::Finite(v * k),
            Self::Infinity if k.is_zero() => Self::zero(),
            Self::Infinity => Self::Infinity,
        }
    }

    /// Adds a finite (possibly negative) offset.
    pub fn shift(&self, k: &Rational) -> Self {
        match self {
            Self::Finite(v) => Self::Finite(v + k),
            Self::Infinity => Self::Infinity,
        }
    }

    /// `self / other` with `x/∞ = 0`, `∞/x = ∞` and `x/0 = ∞` for `x > 0`.
    /// Returns `None` for the indeterminate forms `0/0` and `∞/∞`.
    pub fn ratio(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (Self::Infinity, Self::Infinity) => None,
            (Self::Infinity, _) => Some(Self::Infinity),
            (Self::Finite(_), Self::Infinity) => Some(Self::zero()),
            (Self::Finite(a), Self::Finite(b)) if b.is_zero() => {
                if a.is_zero() {
                    None
                } else {
                    Some(Self::Infinity)
                }
            }
            (Self::Finite(a), Self::Finite(b)) => Some(Self::Finite(a / b)),
        }
    }

    /// Decimal rendering rounded half away from zero; display only.
    pub fn to_decimal(&self, places: usize) -> String {
        match self {
            Self::Finite(v) => rational_to_decimal(v, places),
            Self::Infinity => "inf".to_string(),
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(v: Rational) -> Self {
        Self::Finite(v)
    }
}

impl Add for ExtendedRational {
    type Output = ExtendedRational;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinity,
        }
    }
}

impl<'a> Add<&'a ExtendedRational> for &'a ExtendedRational {
    type Output = ExtendedRational;

    fn add(self, rhs: Self) -> ExtendedRational {
        match (self, rhs) {
            (ExtendedRational::Finite(a), ExtendedRational::Finite(b)) => ExtendedRational::Finite(a + b),
            _ => ExtendedRational::Infinity,
        }
    }
}

impl AddAssign<&ExtendedRational> for ExtendedRational {
    fn add_assign(&mut self, rhs: &ExtendedRational) {
        let lhs = std::mem::replace(self, Self::Infinity);
        *self = &lhs + rhs;
    }
}

impl std::iter::Sum for ExtendedRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, v| acc + v)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{}", format_rational(v)),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Self::Infinity),
            other => parse_rational(other).map(Self::Finite),
        }
    }
}

/// Canonical text form: `"7"`, `"-3/2"`.
pub fn format_rational(v: &Rational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `"3"`, `"-0.25"`, `"301/100"` or `"1e4"`-free decimals exactly.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits_ok = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(whole) || !digits_ok(frac) {
        return Err(bad());
    }
    let mut all = String::with_capacity(whole.len() + frac.len());
    all.push_str(whole);
    all.push_str(frac);
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let v = Rational::new(numer, denom);
    Ok(if neg { -v } else { v })
}

fn rational_to_decimal(v: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = v.abs() * Rational::from_integer(scale.clone());
    // round half away from zero
    let twice: BigInt = scaled.numer() * 2 + scaled.denom();
    let rounded = twice.div_floor(&(scaled.denom() * 2));
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if v.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{whole}");
    }
    let frac = frac.to_string();
    format!("{sign}{whole}.{}{frac}", "0".repeat(places - frac.len()))
}

/// Absolute difference `|a - b|`.
pub fn dist(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_and_dominates() {
        let inf = ExtendedRational::Infinity;
        let five = ExtendedRational::from_int(5);
        assert_eq!(inf.clone() + five.clone(), inf);
        assert!(five < inf);
        assert!(ExtendedRational::Finite(int(-1000)) < five);
        assert_eq!(inf.scale(&int(0)), ExtendedRational::zero());
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("3.01").unwrap(), rat(301, 100));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("301/100").unwrap(), rat(301, 100));
        assert_eq!(parse_rational("10000").unwrap(), int(10000));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("-").is_err());
        assert_eq!("inf".parse::<ExtendedRational>().unwrap(), ExtendedRational::Infinity);
    }

    #[test]
    fn decimal_rendering() {
        let r = ExtendedRational::Finite(rat(1101, 501));
        assert_eq!(r.to_decimal(6), "2.197605");
        assert_eq!(ExtendedRational::Finite(rat(-1, 3)).to_decimal(2), "-0.33");
        assert_eq!(ExtendedRational::Finite(rat(5, 2)).to_decimal(0), "3");
        assert_eq!(ExtendedRational::Finite(rat(1, 20)).to_decimal(3), "0.050");
        assert_eq!(ExtendedRational::Infinity.to_decimal(6), "inf");
    }

    #[test]
    fn ratio_conventions() {
        let z = ExtendedRational::zero();
        let two = ExtendedRational::from_int(2);
        assert_eq!(z.ratio(&z), None);
        assert_eq!(two.ratio(&z), Some(ExtendedRational::Infinity));
        assert_eq!(two.ratio(&two), Some(ExtendedRational::one()));
    }
}
