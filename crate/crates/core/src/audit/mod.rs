//! Approximation ratios, bound checks, strategyproofness audits and the
//! instance families behind each tight example and lower bound.

mod family;
mod random;
mod sp;

use std::fmt;

use rayon::prelude::*;

pub use family::{audit_lower_bound, gen_instance, Family, FamilyInstance, LowerBoundVerdict};
pub use random::{random_instance, random_suite, RandomParams};
pub use sp::{check_group_sp, check_sp, mean_mechanism, DeviationGrid, Violation, GROUP_SP_LIMIT};

use crate::fee::EntranceFee;
use crate::game::{AgentProfile, Objective};
use crate::mechanism::Mechanism;
use crate::number::{int, ExtendedRational, Rational};
use crate::solver::solve_multi;
use crate::{Error, Result};

/// A fee function and profile with a stable identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub fee: EntranceFee,
    pub profile: AgentProfile,
    /// Facility count suggested by the generator.
    pub m: usize,
}

/// `mechanism value / optimum`, both under `objective`, with the optimum
/// taken over placements of as many facilities as the mechanism opens.
/// `0/0` is 1 and `positive/0` is `+∞`. A mechanism that only opens
/// infinite-fee facilities has ratio `+∞`.
pub fn approx_ratio(
    mechanism: &Mechanism,
    fee: &EntranceFee,
    profile: &AgentProfile,
    objective: Objective,
) -> Result<ExtendedRational> {
    let outcome = mechanism.apply(fee, profile)?;
    let value = match outcome.objective(fee, profile, objective) {
        Err(Error::Infeasible) => ExtendedRational::Infinity,
        other => other?,
    };
    let opt = solve_multi(fee, profile, mechanism.arity(), objective)?.value;
    ratio_of(&value, &opt)
}

pub(crate) fn ratio_of(value: &ExtendedRational, opt: &ExtendedRational) -> Result<ExtendedRational> {
    if opt.is_zero() {
        return Ok(if value.is_zero() { ExtendedRational::one() } else { ExtendedRational::Infinity });
    }
    value.ratio(opt).ok_or(Error::Infeasible)
}

/// Upper bounds on approximation ratios as functions of `r_e` and `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundFormula {
    /// `3 - 4/(r_e + 1)`.
    MedianTc,
    /// `2 - 2/(r_e + 1)`.
    RandomizedTc,
    /// `2` if `r_e <= 2`, else `3 - 3/(r_e + 1)`.
    PiecewiseMc,
    /// `n - 2`.
    TwoFacilityTc,
    Constant(Rational),
}

impl BoundFormula {
    /// The proven bound for a mechanism/objective pair, if there is one.
    pub fn for_mechanism(mechanism: &Mechanism, objective: Objective) -> Option<Self> {
        use Mechanism::*;
        match (mechanism, objective) {
            (OptOfMedian, Objective::Tc) => Some(Self::MedianTc),
            (TwoPointRandomization, Objective::Tc) => Some(Self::RandomizedTc),
            (OptOfAgent(1), Objective::Mc) => Some(Self::PiecewiseMc),
            (OptPair(1, usize::MAX), Objective::Mc) => Some(Self::PiecewiseMc),
            (OptPair(1, usize::MAX), Objective::Tc) => Some(Self::TwoFacilityTc),
            (OptimalSolver { objective: o, .. }, obj) if *o == obj => {
                Some(Self::Constant(Rational::from_integer(1.into())))
            }
            _ => None,
        }
    }

    pub fn eval(&self, r_e: &ExtendedRational, n: usize) -> ExtendedRational {
        // c - k/(r+1), which tends to c as r grows without bound.
        let shape = |c: i64, k: i64| match r_e {
            ExtendedRational::Infinity => ExtendedRational::from_int(c),
            ExtendedRational::Finite(r) => ExtendedRational::Finite(int(c) - int(k) / (r + int(1))),
        };
        match self {
            Self::MedianTc => shape(3, 4),
            Self::RandomizedTc => shape(2, 2),
            Self::PiecewiseMc => {
                if *r_e <= ExtendedRational::from_int(2) {
                    ExtendedRational::from_int(2)
                } else {
                    shape(3, 3)
                }
            }
            Self::TwoFacilityTc => ExtendedRational::from_int(n as i64 - 2),
            Self::Constant(c) => ExtendedRational::Finite(c.clone()),
        }
    }
}

impl fmt::Display for BoundFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MedianTc => f.write_str("3-4/(r+1)"),
            Self::RandomizedTc => f.write_str("2-2/(r+1)"),
            Self::PiecewiseMc => f.write_str("r<=2 ? 2 : 3-3/(r+1)"),
            Self::TwoFacilityTc => f.write_str("n-2"),
            Self::Constant(c) => write!(f, "{}", crate::number::format_rational(c)),
        }
    }
}

/// One evaluated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioEntry {
    pub instance_id: String,
    pub r_e: ExtendedRational,
    pub n: usize,
    pub ratio: ExtendedRational,
    pub bound: Option<ExtendedRational>,
    pub within_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub mechanism: String,
    pub objective: Objective,
    pub bound_formula: Option<BoundFormula>,
    pub entries: Vec<RatioEntry>,
    pub worst_ratio: ExtendedRational,
    /// Every entry with a bound satisfies it.
    pub within_bound: bool,
    pub violations: Vec<Violation>,
    /// Set by lower-bound audits only.
    pub verdict: Option<LowerBoundVerdict>,
}

impl AuditReport {
    fn from_entries(
        mechanism: &Mechanism,
        objective: Objective,
        bound_formula: Option<BoundFormula>,
        entries: Vec<RatioEntry>,
    ) -> Self {
        let worst_ratio = entries.iter().map(|e| e.ratio.clone()).max().unwrap_or_else(ExtendedRational::one);
        let within_bound = entries.iter().all(|e| e.within_bound != Some(false));
        AuditReport {
            mechanism: mechanism.label(),
            objective,
            bound_formula,
            entries,
            worst_ratio,
            within_bound,
            violations: Vec::new(),
            verdict: None,
        }
    }
}

pub(crate) fn evaluate(
    mechanism: &Mechanism,
    instance_id: &str,
    fee: &EntranceFee,
    profile: &AgentProfile,
    objective: Objective,
    bound: Option<&BoundFormula>,
) -> Result<RatioEntry> {
    let ratio = approx_ratio(mechanism, fee, profile, objective)?;
    let r_e = fee.extrema().r_e;
    let bound = bound.map(|b| b.eval(&r_e, profile.len()));
    let within_bound = bound.as_ref().map(|b| ratio <= *b);
    Ok(RatioEntry { instance_id: instance_id.to_string(), r_e, n: profile.len(), ratio, bound, within_bound })
}

/// Ratios of `mechanism` over `instances`, in input order, with an exact
/// comparison against `bound` on each instance.
pub fn eval_suite(
    mechanism: &Mechanism,
    instances: &[Instance],
    objective: Objective,
    bound: Option<BoundFormula>,
) -> Result<AuditReport> {
    let entries = instances
        .par_iter()
        .map(|inst| evaluate(mechanism, &inst.id, &inst.fee, &inst.profile, objective, bound.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport::from_entries(mechanism, objective, bound, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::make_profile;
    use crate::number::rat;

    fn fin(n: i64) -> ExtendedRational {
        ExtendedRational::from_int(n)
    }

    #[test]
    fn ratio_examples() {
        let fee = EntranceFee::with_overrides(fin(4), vec![(rat(301, 100), fin(1))]).unwrap();
        let p = make_profile(&[int(0), rat(301, 100)]).unwrap();
        let r = approx_ratio(&Mechanism::OptOfMedian, &fee, &p, Objective::Tc).unwrap();
        assert_eq!(r, ExtendedRational::Finite(rat(1101, 501)));
        let opt = Mechanism::OptimalSolver { objective: Objective::Tc, m: 1 };
        assert_eq!(approx_ratio(&opt, &fee, &p, Objective::Tc).unwrap(), fin(1));

        let tight = EntranceFee::with_overrides(fin(4), vec![(int(4), fin(1))]).unwrap();
        let q = make_profile(&[int(0), int(8)]).unwrap();
        let r = approx_ratio(&Mechanism::OptOfAgent(1), &tight, &q, Objective::Mc).unwrap();
        assert_eq!(r, ExtendedRational::Finite(rat(12, 5)));
    }

    #[test]
    fn zero_optimum_conventions() {
        assert_eq!(ratio_of(&fin(0), &fin(0)).unwrap(), fin(1));
        assert_eq!(ratio_of(&fin(3), &fin(0)).unwrap(), ExtendedRational::Infinity);
        let zero = EntranceFee::constant(fin(0)).unwrap();
        let p = make_profile(&[int(2)]).unwrap();
        assert_eq!(approx_ratio(&Mechanism::OptOfMedian, &zero, &p, Objective::Tc).unwrap(), fin(1));
        let p = make_profile(&[int(0), int(2)]).unwrap();
        let r = approx_ratio(&Mechanism::OptOfAgent(1), &zero, &p, Objective::Tc).unwrap();
        assert_eq!(r, fin(1));
        let r = approx_ratio(&mean_mechanism(), &zero, &make_profile(&[int(0)]).unwrap(), Objective::Mc);
        assert_eq!(r.unwrap(), fin(1));
    }

    #[test]
    fn bound_values() {
        let r = fin(4);
        assert_eq!(BoundFormula::MedianTc.eval(&r, 2), ExtendedRational::Finite(rat(11, 5)));
        assert_eq!(BoundFormula::RandomizedTc.eval(&r, 2), ExtendedRational::Finite(rat(8, 5)));
        assert_eq!(BoundFormula::PiecewiseMc.eval(&r, 2), ExtendedRational::Finite(rat(12, 5)));
        assert_eq!(BoundFormula::PiecewiseMc.eval(&fin(2), 2), fin(2));
        assert_eq!(BoundFormula::TwoFacilityTc.eval(&r, 5), fin(3));
        let inf = ExtendedRational::Infinity;
        assert_eq!(BoundFormula::MedianTc.eval(&inf, 2), fin(3));
        assert_eq!(BoundFormula::RandomizedTc.eval(&inf, 2), fin(2));
        assert_eq!(BoundFormula::PiecewiseMc.eval(&inf, 2), fin(3));
        assert_eq!(BoundFormula::MedianTc.eval(&fin(1), 2), fin(1));
    }

    #[test]
    fn bound_lookup() {
        assert_eq!(
            BoundFormula::for_mechanism(&Mechanism::first_last(), Objective::Tc),
            Some(BoundFormula::TwoFacilityTc)
        );
        assert_eq!(BoundFormula::for_mechanism(&Mechanism::OptOfMedian, Objective::Mc), None);
    }
}
