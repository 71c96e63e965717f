//! Entrance fee functions: piecewise constant over the line, with point
//! overrides, lower semi-continuous so that every interval minimum is attained.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;

use crate::number::{int, ExtendedRational, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationKind {
    NegativeFee,
    UnsortedBreakpoints,
    DuplicateOverride,
    /// The value at a breakpoint or override exceeds one of its one-sided limits.
    LowerSemicontinuity {
        at: Rational,
    },
    NoFiniteFee,
}

impl fmt::Display for ValidationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeFee => f.write_str("negative fee"),
            Self::UnsortedBreakpoints => f.write_str("breakpoints are not strictly increasing"),
            Self::DuplicateOverride => f.write_str("override positions are not distinct"),
            Self::LowerSemicontinuity { at } => write!(
                f,
                "fee at {} exceeds a one-sided limit (not lower semi-continuous)",
                crate::number::format_rational(at)
            ),
            Self::NoFiniteFee => f.write_str("every fee value is infinite"),
        }
    }
}

/// A piecewise-constant entrance fee function.
///
/// `e(x)` is the override at `x` if one exists, otherwise the fee of the
/// rightmost breakpoint `≤ x`, otherwise `default_fee`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntranceFee {
    default_fee: ExtendedRational,
    breakpoints: Vec<(Rational, ExtendedRational)>,
    overrides: BTreeMap<Rational, ExtendedRational>,
    /// Sorted, de-duplicated breakpoint and override positions.
    points: Vec<Rational>,
}

/// Validates and builds a fee function.
pub fn make_fee(
    default_fee: ExtendedRational,
    breakpoints: Vec<(Rational, ExtendedRational)>,
    overrides: Vec<(Rational, ExtendedRational)>,
) -> Result<EntranceFee> {
    let invalid = |k| Err(Error::Validation(k));
    let all_fees = std::iter::once(&default_fee)
        .chain(breakpoints.iter().map(|(_, f)| f))
        .chain(overrides.iter().map(|(_, f)| f));
    if all_fees.clone().any(ExtendedRational::is_negative) {
        return invalid(ValidationKind::NegativeFee);
    }
    let any_finite = all_fees.clone().any(ExtendedRational::is_finite);
    if breakpoints.windows(2).any(|w| w[0].0 >= w[1].0) {
        return invalid(ValidationKind::UnsortedBreakpoints);
    }
    let mut override_map = BTreeMap::new();
    for (p, f) in overrides {
        if override_map.insert(p, f).is_some() {
            return invalid(ValidationKind::DuplicateOverride);
        }
    }
    if !any_finite {
        return invalid(ValidationKind::NoFiniteFee);
    }

    let mut points: Vec<Rational> =
        breakpoints.iter().map(|(p, _)| p.clone()).chain(override_map.keys().cloned()).collect();
    points.sort();
    points.dedup();

    let fee = EntranceFee { default_fee, breakpoints, overrides: override_map, points };
    for p in &fee.points {
        let here = fee.eval(p);
        if here > fee.left_limit(p) || here > fee.piece_fee(p) {
            return invalid(ValidationKind::LowerSemicontinuity { at: p.clone() });
        }
    }
    Ok(fee)
}

impl EntranceFee {
    /// `e ≡ c`.
    pub fn constant(c: ExtendedRational) -> Result<Self> {
        make_fee(c, vec![], vec![])
    }

    /// Fee `base` everywhere except the listed discount points.
    pub fn with_overrides(
        base: ExtendedRational,
        overrides: Vec<(Rational, ExtendedRational)>,
    ) -> Result<Self> {
        make_fee(base, vec![], overrides)
    }

    pub fn default_fee(&self) -> &ExtendedRational {
        &self.default_fee
    }

    pub fn breakpoints(&self) -> &[(Rational, ExtendedRational)] {
        &self.breakpoints
    }

    pub fn overrides(&self) -> impl Iterator<Item = (&Rational, &ExtendedRational)> {
        self.overrides.iter()
    }

    /// Breakpoint and override positions, sorted and distinct.
    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    /// `e(x)`.
    pub fn eval(&self, x: &Rational) -> ExtendedRational {
        match self.overrides.get(x) {
            Some(f) => f.clone(),
            None => self.piece_fee(x),
        }
    }

    /// Fee of the piece containing `x`, ignoring overrides.
    fn piece_fee(&self, x: &Rational) -> ExtendedRational {
        let idx = self.breakpoints.partition_point(|(p, _)| p <= x);
        if idx == 0 {
            self.default_fee.clone()
        } else {
            self.breakpoints[idx - 1].1.clone()
        }
    }

    /// Limit of `e` approaching `x` from the left.
    fn left_limit(&self, x: &Rational) -> ExtendedRational {
        let idx = self.breakpoints.partition_point(|(p, _)| p < x);
        if idx == 0 {
            self.default_fee.clone()
        } else {
            self.breakpoints[idx - 1].1.clone()
        }
    }

    /// Every value the function attains: the default, each piece fee and each
    /// override.
    fn attained(&self) -> impl Iterator<Item = &ExtendedRational> {
        std::iter::once(&self.default_fee)
            .chain(self.breakpoints.iter().map(|(_, f)| f))
            .chain(self.overrides.values())
    }

    pub fn extrema(&self) -> FeeExtrema {
        let e_min = self.attained().min().cloned().expect("default fee always attained");
        let e_max = self.attained().max().cloned().expect("default fee always attained");
        let r_e = max_min_ratio(&e_min, &e_max);
        FeeExtrema { e_min, e_max, r_e }
    }

    /// Exact minimizer of `a·e(ℓ) + b·ℓ` over `[lo, hi]`.
    ///
    /// Minimizers are ranked by value, then by smaller fee, then by larger
    /// position. Locations with an infinite fee have value `+∞` regardless of
    /// `a`; if every location in the interval is infinite the rightmost
    /// candidate is returned with value `+∞`.
    pub fn min_affine(
        &self,
        a: i64,
        b: i64,
        lo: &Rational,
        hi: &Rational,
    ) -> Result<(Rational, ExtendedRational)> {
        if lo > hi {
            return Err(Error::EmptyInterval);
        }
        assert!(a >= 0, "min_affine requires a >= 0");
        let a = int(a);
        let b = int(b);
        let start = self.points.partition_point(|p| p <= lo);
        let end = self.points.partition_point(|p| p < hi).max(start);
        let inner = self.points[start..end].iter();
        let candidates = std::iter::once(lo).chain(inner).chain(std::iter::once(hi));

        let best = candidates
            .map(|loc| {
                let fee = self.eval(loc);
                let value = match &fee {
                    ExtendedRational::Finite(f) => ExtendedRational::Finite(&a * f + &b * loc),
                    ExtendedRational::Infinity => ExtendedRational::Infinity,
                };
                (value, fee, loc)
            })
            .min_by(|x, y| (&x.0, &x.1, Reverse(x.2)).cmp(&(&y.0, &y.1, Reverse(y.2))))
            .expect("at least one candidate");
        Ok((best.2.clone(), best.0))
    }
}

impl fmt::Display for EntranceFee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e(default={}", self.default_fee)?;
        for (p, v) in &self.breakpoints {
            write!(f, ", [{}..)={}", crate::number::format_rational(p), v)?;
        }
        for (p, v) in &self.overrides {
            write!(f, ", @{}={}", crate::number::format_rational(p), v)?;
        }
        f.write_str(")")
    }
}

/// `e_min`, `e_max` and the max-min ratio `r_e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeeExtrema {
    pub e_min: ExtendedRational,
    pub e_max: ExtendedRational,
    pub r_e: ExtendedRational,
}

/// `1` if both are zero, `+∞` if only `e_min` is zero, else `e_max / e_min`.
pub fn max_min_ratio(e_min: &ExtendedRational, e_max: &ExtendedRational) -> ExtendedRational {
    if e_min.is_zero() {
        if e_max.is_zero() {
            ExtendedRational::one()
        } else {
            ExtendedRational::Infinity
        }
    } else {
        e_max.ratio(e_min).expect("e_min > 0 and finite")
    }
}
