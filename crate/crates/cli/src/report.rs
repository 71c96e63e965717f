//! JSON shapes for command output. Exact values are strings; the decimal
//! renderings are for reading only.

use feeloc::audit::{AuditReport, LowerBoundVerdict, RatioEntry, Violation};
use feeloc::number::format_rational;
use feeloc::{ExtendedRational, MechanismOutcome, Rational, Solution};
use serde::Serialize;

pub const DECIMAL_PLACES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Value {
    pub exact: String,
    pub decimal: String,
}

impl From<&ExtendedRational> for Value {
    fn from(v: &ExtendedRational) -> Self {
        Value { exact: v.to_string(), decimal: v.to_decimal(DECIMAL_PLACES) }
    }
}

fn strings(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(format_rational).collect()
}

#[derive(Debug, Serialize)]
pub struct SolutionJson {
    pub objective: &'static str,
    pub m: usize,
    pub locations: Vec<String>,
    pub value: String,
    /// 1-based sorted agent ranges served by each facility.
    pub partition: Vec<[usize; 2]>,
}

impl SolutionJson {
    pub fn new(objective: feeloc::Objective, m: usize, sol: &Solution) -> Self {
        SolutionJson {
            objective: objective.as_str(),
            m,
            locations: strings(sol.placement.locations()),
            value: sol.value.to_string(),
            partition: sol.partition.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LotteryEntry {
    pub locations: Vec<String>,
    pub p: String,
}

#[derive(Debug, Serialize)]
pub struct SampleJson {
    pub seed: u64,
    pub draws: usize,
    /// Draw counts aligned with `lottery`.
    pub counts: Vec<usize>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeBody {
    Deterministic { locations: Vec<String> },
    Randomized { lottery: Vec<LotteryEntry> },
}

#[derive(Debug, Serialize)]
pub struct OutcomeJson {
    pub mechanism: String,
    #[serde(flatten)]
    pub body: OutcomeBody,
    pub expected_tc: Value,
    pub expected_mc: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleJson>,
}

impl OutcomeBody {
    pub fn new(outcome: &MechanismOutcome) -> Self {
        match outcome {
            MechanismOutcome::Deterministic(p) => {
                OutcomeBody::Deterministic { locations: strings(p.locations()) }
            }
            MechanismOutcome::Randomized(lot) => OutcomeBody::Randomized {
                lottery: lot
                    .support()
                    .iter()
                    .map(|(p, q)| LotteryEntry { locations: strings(p.locations()), p: format_rational(q) })
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Misreport {
    pub agent: usize,
    pub report: String,
}

#[derive(Debug, Serialize)]
pub struct ViolationJson {
    /// 0-based input-order agent indices.
    pub coalition: Vec<usize>,
    pub true_profile: Vec<String>,
    pub misreports: Vec<Misreport>,
    pub cost_before: Vec<String>,
    pub cost_after: Vec<String>,
}

impl From<&Violation> for ViolationJson {
    fn from(v: &Violation) -> Self {
        let costs = |cs: &[ExtendedRational]| cs.iter().map(ToString::to_string).collect();
        ViolationJson {
            coalition: v.coalition.clone(),
            true_profile: strings(&v.true_profile),
            misreports: v
                .misreports
                .iter()
                .map(|(a, r)| Misreport { agent: *a, report: format_rational(r) })
                .collect(),
            cost_before: costs(&v.cost_before),
            cost_after: costs(&v.cost_after),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpReport {
    pub mechanism: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_id: Option<String>,
    pub max_coalition: usize,
    pub grid_points: usize,
    pub strategyproof: bool,
    pub violations: Vec<ViolationJson>,
}

#[derive(Debug, Serialize)]
pub struct RunJson {
    pub instance_id: String,
    pub r_e: String,
    pub n: usize,
    pub ratio: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_bound: Option<bool>,
}

impl From<&RatioEntry> for RunJson {
    fn from(e: &RatioEntry) -> Self {
        RunJson {
            instance_id: e.instance_id.clone(),
            r_e: e.r_e.to_string(),
            n: e.n,
            ratio: (&e.ratio).into(),
            bound: e.bound.as_ref().map(ToString::to_string),
            within_bound: e.within_bound,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictJson {
    RatioMeetsBound { instance_id: String, ratio: String, threshold: String },
    SpViolation { instance_id: String, threshold: String },
    NotCertified { threshold: String },
}

impl From<&LowerBoundVerdict> for VerdictJson {
    fn from(v: &LowerBoundVerdict) -> Self {
        match v {
            LowerBoundVerdict::RatioMeetsBound { instance_id, ratio, threshold } => {
                VerdictJson::RatioMeetsBound {
                    instance_id: instance_id.clone(),
                    ratio: ratio.to_string(),
                    threshold: format_rational(threshold),
                }
            }
            LowerBoundVerdict::SpViolation { instance_id, threshold } => VerdictJson::SpViolation {
                instance_id: instance_id.clone(),
                threshold: format_rational(threshold),
            },
            LowerBoundVerdict::NotCertified { threshold } => {
                VerdictJson::NotCertified { threshold: format_rational(threshold) }
            }
        }
    }
}

/// Output of `eval`.
#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub mechanism: String,
    pub objective: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_formula: Option<String>,
    pub worst_ratio: Value,
    pub within_bound: bool,
    pub runs: Vec<RunJson>,
    pub violations: Vec<ViolationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
}

impl From<&AuditReport> for ReportFile {
    fn from(r: &AuditReport) -> Self {
        ReportFile {
            mechanism: r.mechanism.clone(),
            objective: r.objective.as_str(),
            bound_formula: r.bound_formula.as_ref().map(ToString::to_string),
            worst_ratio: (&r.worst_ratio).into(),
            within_bound: r.within_bound,
            runs: r.entries.iter().map(Into::into).collect(),
            violations: r.violations.iter().map(Into::into).collect(),
            verdict: r.verdict.as_ref().map(Into::into),
        }
    }
}
