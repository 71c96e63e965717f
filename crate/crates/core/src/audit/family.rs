//! Tight examples and lower-bound constructions, and audits that replay the
//! lower-bound arguments against a concrete mechanism.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use super::sp::{check_sp, DeviationGrid, Violation};
use super::{evaluate, AuditReport, BoundFormula, Instance};
use crate::fee::EntranceFee;
use crate::game::{make_profile, AgentProfile, Objective};
use crate::mechanism::Mechanism;
use crate::number::{format_rational, int, parse_rational, rat, ExtendedRational, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `m_med` total-cost tightness: `e(L) = e_min`, `e_max` elsewhere, agents split between 0 and `L`.
    TcTightMed,
    /// `m_1` maximum-cost tightness: `e(e_max) = e_min`, profile `(0, 2 e_max)`.
    McTightM1,
    /// Deterministic total-cost lower bound: fee `d` at `±1`, `d + 1` elsewhere.
    TcLbDet,
    /// Randomized total-cost lower bound: free facilities at `±1` only.
    TcLbRand,
    /// Maximum-cost lower bound 2: `e(1 - α) = 1`, `α` elsewhere.
    McLb2,
    /// Maximum-cost lower bound: fee `d + 2` at `±1`, `d + 4` elsewhere.
    McLb3,
    /// Randomized maximum-cost lower bound: free facilities at `±1` only.
    McLbRand,
    /// `m_{1,n}` total-cost example: `e(L/2) = e_min`, agents at 0, `L/2` (n-2 times) and `L`.
    TwoFacTc,
    /// A one-facility maximum-cost family plus a far-away anchor agent.
    TwoFacLb,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::TcTightMed,
        Family::McTightM1,
        Family::TcLbDet,
        Family::TcLbRand,
        Family::McLb2,
        Family::McLb3,
        Family::McLbRand,
        Family::TwoFacTc,
        Family::TwoFacLb,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::TcTightMed => "TC_TIGHT_MED",
            Family::McTightM1 => "MC_TIGHT_M1",
            Family::TcLbDet => "TC_LB_DET",
            Family::TcLbRand => "TC_LB_RAND",
            Family::McLb2 => "MC_LB_2",
            Family::McLb3 => "MC_LB_3",
            Family::McLbRand => "MC_LB_RAND",
            Family::TwoFacTc => "TWO_FAC_TC",
            Family::TwoFacLb => "TWO_FAC_LB",
        }
    }

    pub fn objective(self) -> Objective {
        match self {
            Family::TcTightMed | Family::TcLbDet | Family::TcLbRand | Family::TwoFacTc => Objective::Tc,
            _ => Objective::Mc,
        }
    }

    /// Facilities opened by the mechanisms the family targets.
    pub fn arity(self) -> usize {
        match self {
            Family::TwoFacTc | Family::TwoFacLb => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::BadParams(format!("unknown family {s:?}")))
    }
}

/// A generated family member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub family: Family,
    /// Resolved parameters (defaults filled in), in canonical order.
    pub params: Vec<(String, String)>,
    pub fee: EntranceFee,
    pub profiles: Vec<AgentProfile>,
    pub labels: Vec<String>,
    /// The bound the construction approaches.
    pub limit: Rational,
    /// What the construction certifies at the chosen parameters.
    pub threshold: Rational,
}

impl FamilyInstance {
    pub fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
    }

    /// One instance per profile, with ids `FAMILY:label`.
    pub fn instances(&self) -> Vec<Instance> {
        self.profiles
            .iter()
            .zip(&self.labels)
            .map(|(p, l)| Instance {
                id: format!("{}:{l}", self.family),
                fee: self.fee.clone(),
                profile: p.clone(),
                m: self.family.arity(),
            })
            .collect()
    }

    /// Default tolerance for lower-bound audits: the construction's slack.
    pub fn slack(&self) -> Rational {
        &self.limit - &self.threshold
    }
}

struct Params {
    values: BTreeMap<String, String>,
    used: Vec<(String, String)>,
}

impl Params {
    fn parse(s: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::BadParams(format!("expected key=value, got {part:?}")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::BadParams(format!("repeated parameter {k:?}")));
            }
        }
        Ok(Params { values, used: Vec::new() })
    }

    fn text(&mut self, key: &str, default: &str) -> String {
        let v = self.values.remove(key).unwrap_or_else(|| default.to_string());
        self.used.push((key.to_string(), v.clone()));
        v
    }

    fn num(&mut self, key: &str, default: &str) -> Result<Rational> {
        let raw = self.text(key, default);
        let v = parse_rational(&raw).map_err(|_| Error::BadParams(format!("{key}={raw}")))?;
        let last = self.used.last_mut().expect("just pushed");
        last.1 = format_rational(&v);
        Ok(v)
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = self.num(key, &default.to_string())?;
        if !v.is_integer() || v < int(0) {
            return Err(Error::BadParams(format!("{key} must be a non-negative integer")));
        }
        usize::try_from(v.to_integer()).map_err(|_| Error::BadParams(format!("{key} too large")))
    }

    fn finish(self) -> Result<Vec<(String, String)>> {
        if let Some(k) = self.values.keys().next() {
            return Err(Error::BadParams(format!("unknown parameter {k:?}")));
        }
        Ok(self.used)
    }
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::BadParams(what.to_string()))
    }
}

fn fin(v: &Rational) -> ExtendedRational {
    ExtendedRational::Finite(v.clone())
}

fn profiles(rows: Vec<Vec<Rational>>) -> Result<Vec<AgentProfile>> {
    rows.iter().map(|r| make_profile(r)).collect()
}

fn labels(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

fn check_eps(eps: &Rational) -> Result<()> {
    require(*eps > int(0) && *eps < int(1), "eps must lie in (0, 1)")
}

/// `c - k/(r+1)` at a finite `r`.
fn shape(c: i64, k: i64, r: &Rational) -> Rational {
    int(c) - int(k) / (r + int(1))
}

/// Builds a family member from `key=value` pairs, e.g. `"d=1,eps=1/100"`.
/// Missing parameters take the defaults used throughout the test suite;
/// `eps` defaults to `1/100`.
pub fn gen_instance(family: Family, params: &str) -> Result<FamilyInstance> {
    let mut p = Params::parse(params)?;
    let one = ExtendedRational::one();
    let (fee, rows, labels, limit, threshold) = match family {
        Family::TcTightMed => {
            let e_min = p.num("e_min", "1")?;
            let e_max = p.num("e_max", "4")?;
            let l = p.num("L", "301/100")?;
            let n = p.count("n", 2)?;
            require(e_min >= int(0) && e_max > e_min, "need 0 <= e_min < e_max")?;
            require(l > &e_max - &e_min, "need L > e_max - e_min")?;
            require(n >= 2 && n % 2 == 0, "n must be even and at least 2")?;
            let fee = EntranceFee::with_overrides(fin(&e_max), vec![(l.clone(), fin(&e_min))])?;
            let mut row = vec![int(0); n / 2];
            row.extend(std::iter::repeat_n(l.clone(), n / 2));
            let limit = if e_min.is_zero() { int(3) } else { shape(3, 4, &(&e_max / &e_min)) };
            let two = int(2);
            let threshold = (&l + &two * &e_max) / (&l + &two * &e_min);
            (fee, vec![row], vec!["x".to_string()], limit, threshold)
        }
        Family::McTightM1 => {
            let e_min = p.num("e_min", "1")?;
            let e_max = p.num("e_max", "4")?;
            require(e_min > int(0) && e_max > int(2) * &e_min, "need e_max > 2 e_min > 0")?;
            let fee = EntranceFee::with_overrides(fin(&e_max), vec![(e_max.clone(), fin(&e_min))])?;
            let limit = shape(3, 3, &(&e_max / &e_min));
            (fee, vec![vec![int(0), int(2) * &e_max]], vec!["x".to_string()], limit.clone(), limit)
        }
        Family::TcLbDet => {
            let d = p.num("d", "1")?;
            let eps = p.num("eps", "1/100")?;
            require(d > int(0), "d must be positive")?;
            check_eps(&eps)?;
            let fee = EntranceFee::with_overrides(
                fin(&(&d + int(1))),
                vec![(int(-1), fin(&d)), (int(1), fin(&d))],
            )?;
            let two_d = int(2) * &d;
            let limit = (&two_d + int(3)) / (&two_d + int(1));
            let threshold = (&two_d + int(3) - &eps) / (&two_d + int(1) + &eps);
            (fee, tc_lb_rows(&eps), labels(3), limit, threshold)
        }
        Family::TcLbRand => {
            let eps = p.num("eps", "1/100")?;
            check_eps(&eps)?;
            let threshold = int(2) / (int(1) + &eps);
            (free_at_pm_one(), tc_lb_rows(&eps), labels(3), int(2), threshold)
        }
        Family::McLb2 => {
            let alpha = p.num("alpha", "3")?;
            let eps = p.num("eps", "1/100")?;
            let n = p.count("n", 2)?;
            require(alpha >= int(1), "alpha must be at least 1")?;
            check_eps(&eps)?;
            require(n >= 2, "n must be at least 2")?;
            let fee = EntranceFee::with_overrides(fin(&alpha), vec![(int(1) - &alpha, one.clone())])?;
            let l_eps = int(2) * (int(1) / &eps - int(1)) * &alpha;
            let rows = [rat(1, 4), rat(1, 2), int(1), int(2), int(4)]
                .iter()
                .map(|k| {
                    let mut row = vec![int(0); n - 1];
                    row.push(&l_eps * k);
                    row
                })
                .collect();
            (fee, rows, labels(5), int(2), int(2) - &eps)
        }
        Family::McLb3 => {
            let d = p.num("d", "1")?;
            let eps = p.num("eps", "1/100")?;
            require(d > int(-2), "d must exceed -2")?;
            check_eps(&eps)?;
            let fee = EntranceFee::with_overrides(
                fin(&(&d + int(4))),
                vec![(int(-1), fin(&(&d + int(2)))), (int(1), fin(&(&d + int(2))))],
            )?;
            let limit = (&d + int(5)) / (&d + int(3));
            let threshold = (&d + int(5)) / (&d + int(3) + &eps);
            (fee, mc_lb_rows(&eps), labels(3), limit, threshold)
        }
        Family::McLbRand => {
            let eps = p.num("eps", "1/100")?;
            check_eps(&eps)?;
            let threshold = int(2) / (int(1) + &eps);
            (free_at_pm_one(), mc_lb_rows(&eps), labels(3), int(2), threshold)
        }
        Family::TwoFacTc => {
            let n = p.count("n", 5)?;
            let e_min = p.num("e_min", "1")?;
            let e_max = p.num("e_max", "2")?;
            let l = p.num("L", "10000")?;
            require(n >= 3, "n must be at least 3")?;
            require(e_min >= int(0) && e_max >= e_min, "need 0 <= e_min <= e_max")?;
            require(l > int(2) * (&e_max - &e_min), "need L > 2 (e_max - e_min)")?;
            let half = &l / int(2);
            let fee = EntranceFee::with_overrides(fin(&e_max), vec![(half.clone(), fin(&e_min))])?;
            let mut row = vec![int(0)];
            row.extend(std::iter::repeat_n(half.clone(), n - 2));
            row.push(l.clone());
            let nn = int(n as i64);
            let threshold =
                ((&nn - int(2)) * &half + &nn * &e_max) / (&half + (&nn - int(1)) * &e_min + &e_max);
            (fee, vec![row], vec!["x".to_string()], nn - int(2), threshold)
        }
        Family::TwoFacLb => {
            let base: Family = p.text("base", "MC_LB_2").parse()?;
            require(
                matches!(base, Family::McLb2 | Family::McLb3 | Family::McLbRand),
                "base must be MC_LB_2, MC_LB_3 or MC_LB_RAND",
            )?;
            let scale = p.num("anchor_scale", "1000000")?;
            require(scale > int(0), "anchor_scale must be positive")?;
            let rest: Vec<String> = p.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            p.values.clear();
            let inner = gen_instance(base, &rest.join(","))?;
            p.used.extend(inner.params.iter().cloned());
            return two_facility_lb(inner, scale, p.finish()?);
        }
    };
    Ok(FamilyInstance {
        family,
        params: p.finish()?,
        fee,
        profiles: profiles(rows)?,
        labels,
        limit,
        threshold,
    })
}

fn free_at_pm_one() -> EntranceFee {
    let zero = ExtendedRational::zero();
    EntranceFee::with_overrides(ExtendedRational::Infinity, vec![(int(-1), zero.clone()), (int(1), zero)])
        .expect("valid fee")
}

fn tc_lb_rows(eps: &Rational) -> Vec<Vec<Rational>> {
    vec![vec![int(-1), eps.clone()], vec![-eps.clone(), int(1)], vec![int(-1), int(1)]]
}

fn mc_lb_rows(eps: &Rational) -> Vec<Vec<Rational>> {
    vec![vec![-eps.clone(), int(2)], vec![int(-2), eps.clone()], vec![int(-2), int(2)]]
}

/// Adds one agent far to the left of every base profile. The anchor's
/// location is given the base fee's minimum so that serving the anchor never
/// dominates the maximum cost.
fn two_facility_lb(
    base: FamilyInstance,
    scale: Rational,
    params: Vec<(String, String)>,
) -> Result<FamilyInstance> {
    let all: Vec<&Rational> = base.profiles.iter().flat_map(|p| p.positions()).collect();
    let left = all.iter().min().expect("non-empty").to_owned().clone();
    let diameter = base
        .profiles
        .iter()
        .map(|p| &p.positions()[p.len() - 1] - &p.positions()[0])
        .max()
        .expect("non-empty");
    let anchor = left - scale * diameter;
    let e_min = base.fee.extrema().e_min;
    let mut overrides: Vec<(Rational, ExtendedRational)> =
        base.fee.overrides().map(|(p, v)| (p.clone(), v.clone())).collect();
    overrides.push((anchor.clone(), e_min));
    let fee =
        crate::fee::make_fee(base.fee.default_fee().clone(), base.fee.breakpoints().to_vec(), overrides)?;
    let rows = base
        .profiles
        .iter()
        .map(|p| {
            let mut row = vec![anchor.clone()];
            row.extend(p.positions().iter().cloned());
            row
        })
        .collect();
    Ok(FamilyInstance {
        family: Family::TwoFacLb,
        params,
        fee,
        profiles: profiles(rows)?,
        labels: base.labels,
        limit: base.limit,
        threshold: base.threshold,
    })
}

/// Outcome of a lower-bound audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerBoundVerdict {
    /// Some profile has ratio at least `threshold`.
    RatioMeetsBound { instance_id: String, ratio: ExtendedRational, threshold: Rational },
    /// Every ratio is below `threshold` and the mechanism is manipulable on the family.
    SpViolation { instance_id: String, threshold: Rational },
    /// Neither branch holds on this family.
    NotCertified { threshold: Rational },
}

impl LowerBoundVerdict {
    pub fn is_certified(&self) -> bool {
        !matches!(self, LowerBoundVerdict::NotCertified { .. })
    }
}

/// Runs `mechanism` on every profile of the family and reports which side
/// of the lower-bound dichotomy it falls on: a ratio of at least
/// `limit - tolerance`, or a profitable misreport among the family's
/// positions and the mechanism's facility locations. `tolerance` defaults to
/// the family's own slack.
pub fn audit_lower_bound(
    mechanism: &Mechanism,
    family: &FamilyInstance,
    tolerance: Option<Rational>,
) -> Result<AuditReport> {
    if mechanism.arity() != family.family.arity() {
        return Err(Error::BadParams(format!(
            "{} opens {} facilities, {} needs {}",
            mechanism.label(),
            mechanism.arity(),
            family.family,
            family.family.arity()
        )));
    }
    let objective = family.family.objective();
    let threshold = &family.limit - tolerance.unwrap_or_else(|| family.slack());
    let instances = family.instances();
    let entries = instances
        .iter()
        .map(|inst| evaluate(mechanism, &inst.id, &inst.fee, &inst.profile, objective, None))
        .collect::<Result<Vec<_>>>()?;

    let mut points: Vec<Rational> =
        instances.iter().flat_map(|inst| inst.profile.positions().iter().cloned()).collect();
    for inst in &instances {
        points.extend(mechanism.apply(&inst.fee, &inst.profile)?.locations());
    }
    let grid = DeviationGrid::from_points(points);
    let mut violations: Vec<Violation> = Vec::new();
    let mut first_violation = None;
    for inst in &instances {
        let found = check_sp(mechanism, &inst.fee, &inst.profile, &grid)?;
        if first_violation.is_none() && !found.is_empty() {
            first_violation = Some(inst.id.clone());
        }
        violations.extend(found);
    }

    let bound = ExtendedRational::Finite(threshold.clone());
    let verdict = match entries.iter().find(|e| e.ratio >= bound) {
        Some(e) => LowerBoundVerdict::RatioMeetsBound {
            instance_id: e.instance_id.clone(),
            ratio: e.ratio.clone(),
            threshold,
        },
        None => match first_violation {
            Some(instance_id) => LowerBoundVerdict::SpViolation { instance_id, threshold },
            None => LowerBoundVerdict::NotCertified { threshold },
        },
    };
    let mut report = AuditReport::from_entries(
        mechanism,
        objective,
        Some(BoundFormula::Constant(family.limit.clone())),
        entries,
    );
    report.violations = violations;
    report.verdict = Some(verdict);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{max_cost, total_cost, Placement};

    fn at(fi: &FamilyInstance, k: usize) -> &AgentProfile {
        &fi.profiles[k]
    }

    fn tc(fi: &FamilyInstance, k: usize, l: Rational) -> ExtendedRational {
        total_cost(&fi.fee, at(fi, k), &Placement::single(l)).unwrap()
    }

    fn mc(fi: &FamilyInstance, k: usize, l: Rational) -> ExtendedRational {
        max_cost(&fi.fee, at(fi, k), &Placement::single(l)).unwrap()
    }

    #[test]
    fn tc_lb_det_layout() {
        let fi = gen_instance(Family::TcLbDet, "d=1,eps=1/100").unwrap();
        assert_eq!(fi.fee.eval(&int(-1)), ExtendedRational::one());
        assert_eq!(fi.fee.eval(&int(1)), ExtendedRational::one());
        assert_eq!(fi.fee.eval(&int(0)), ExtendedRational::from_int(2));
        assert_eq!(at(&fi, 0).positions(), &[int(-1), rat(1, 100)]);
        assert_eq!(at(&fi, 1).positions(), &[rat(-1, 100), int(1)]);
        assert_eq!(at(&fi, 2).positions(), &[int(-1), int(1)]);
        assert_eq!(tc(&fi, 0, int(-1)), ExtendedRational::Finite(rat(301, 100)));
        assert_eq!(tc(&fi, 0, int(1)), ExtendedRational::Finite(rat(499, 100)));
        assert_eq!(fi.fee.extrema().r_e, ExtendedRational::from_int(2));
        assert_eq!(fi.params_string(), "d=1,eps=1/100");
    }

    #[test]
    fn tight_med_layout() {
        let fi = gen_instance(Family::TcTightMed, "e_min=1,e_max=4,L=301/100,n=2").unwrap();
        assert_eq!(at(&fi, 0).positions(), &[int(0), rat(301, 100)]);
        assert_eq!(fi.fee.eval(&rat(301, 100)), ExtendedRational::one());
        assert_eq!(fi.threshold, rat(1101, 501));
        assert_eq!(fi.limit, rat(11, 5));
        assert!(gen_instance(Family::TcTightMed, "L=3").is_err());
        assert!(gen_instance(Family::TcTightMed, "n=3").is_err());
    }

    #[test]
    fn mc_lb_2_layout() {
        let fi = gen_instance(Family::McLb2, "alpha=3").unwrap();
        assert_eq!(fi.fee.eval(&int(-2)), ExtendedRational::one());
        assert_eq!(fi.fee.eval(&int(0)), ExtendedRational::from_int(3));
        // L_eps = 2 (1/eps - 1) alpha = 594.
        let last: Vec<Rational> = fi.profiles.iter().map(|p| p.positions()[1].clone()).collect();
        assert_eq!(last, vec![rat(297, 2), int(297), int(594), int(1188), int(2376)]);
    }

    #[test]
    fn mc_lb_3_layout() {
        let fi = gen_instance(Family::McLb3, "d=1,eps=1/100").unwrap();
        assert_eq!(mc(&fi, 0, int(-1)), ExtendedRational::from_int(6));
        assert_eq!(mc(&fi, 0, int(1)), ExtendedRational::Finite(rat(401, 100)));
        assert_eq!(fi.limit, rat(3, 2));
        assert!(gen_instance(Family::McLb3, "d=-2").is_err());
    }

    #[test]
    fn two_facility_layouts() {
        let fi = gen_instance(Family::TwoFacTc, "n=5,e_min=1,e_max=2,L=10000").unwrap();
        assert_eq!(at(&fi, 0).len(), 5);
        assert_eq!(fi.threshold, rat(15010, 5006));
        let lb = gen_instance(Family::TwoFacLb, "base=MC_LB_RAND,anchor_scale=10").unwrap();
        let first = &at(&lb, 0).positions()[0];
        assert_eq!(*first, int(-42));
        assert_eq!(lb.fee.eval(first), ExtendedRational::zero());
        assert_eq!(lb.params_string(), "base=MC_LB_RAND,anchor_scale=10,eps=1/100");
    }

    #[test]
    fn parameter_errors() {
        assert!(gen_instance(Family::TcLbDet, "eps=1").is_err());
        assert!(gen_instance(Family::TcLbDet, "q=1").is_err());
        assert!(gen_instance(Family::TcLbDet, "d").is_err());
        assert!(gen_instance(Family::TwoFacLb, "base=TC_LB_DET").is_err());
        assert!("NOPE".parse::<Family>().is_err());
        assert_eq!("tc_lb_det".parse::<Family>().unwrap(), Family::TcLbDet);
    }

    #[test]
    fn median_meets_deterministic_bound() {
        let fi = gen_instance(Family::TcLbDet, "").unwrap();
        let r = audit_lower_bound(&Mechanism::OptOfMedian, &fi, None).unwrap();
        assert_eq!(r.entries[1].ratio, ExtendedRational::Finite(rat(499, 301)));
        assert!(matches!(r.verdict, Some(LowerBoundVerdict::RatioMeetsBound { .. })));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn optimum_is_manipulable() {
        let fi = gen_instance(Family::TcLbDet, "").unwrap();
        let opt = Mechanism::OptimalSolver { objective: Objective::Tc, m: 1 };
        let r = audit_lower_bound(&opt, &fi, None).unwrap();
        assert!(r.entries.iter().all(|e| e.ratio == ExtendedRational::one()));
        assert!(matches!(r.verdict, Some(LowerBoundVerdict::SpViolation { .. })));
        let v = r
            .violations
            .iter()
            .find(|v| v.true_profile == vec![int(-1), rat(1, 100)])
            .expect("agent at eps deviates");
        assert_eq!(v.misreports, vec![(1, int(1))]);
        assert_eq!(v.cost_before, vec![ExtendedRational::Finite(rat(201, 100))]);
        assert_eq!(v.cost_after, vec![ExtendedRational::Finite(rat(199, 100))]);
    }

    #[test]
    fn randomized_meets_bound() {
        let fi = gen_instance(Family::TcLbRand, "").unwrap();
        let r = audit_lower_bound(&Mechanism::TwoPointRandomization, &fi, None).unwrap();
        assert_eq!(r.entries[1].ratio, ExtendedRational::Finite(rat(200, 101)));
        assert!(matches!(r.verdict, Some(LowerBoundVerdict::RatioMeetsBound { .. })));
    }

    #[test]
    fn arity_mismatch() {
        let fi = gen_instance(Family::TwoFacTc, "").unwrap();
        assert!(audit_lower_bound(&Mechanism::OptOfMedian, &fi, None).is_err());
    }
}
