//! Strategyproof mechanisms built on per-agent optimal locations.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::fee::EntranceFee;
use crate::game::{
    agent_cost, expected_agent_cost, expected_objective, objective_value, optimal_location, AgentProfile,
    Lottery, Objective, Placement,
};
use crate::number::{ExtendedRational, Rational};
use crate::solver::{solve_multi, solve_one_tc};
use crate::{Error, Result};

/// What a mechanism returns: a placement, or a lottery over placements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MechanismOutcome {
    Deterministic(Placement),
    Randomized(Lottery),
}

impl MechanismOutcome {
    /// Cost (expected cost for lotteries) of an agent whose true position is `x`.
    pub fn agent_cost(&self, fee: &EntranceFee, x: &Rational) -> ExtendedRational {
        match self {
            Self::Deterministic(p) => agent_cost(fee, x, p).cost,
            Self::Randomized(l) => expected_agent_cost(fee, x, l),
        }
    }

    pub fn objective(
        &self,
        fee: &EntranceFee,
        profile: &AgentProfile,
        objective: Objective,
    ) -> Result<ExtendedRational> {
        match self {
            Self::Deterministic(p) => objective_value(fee, profile, p, objective),
            Self::Randomized(l) => expected_objective(fee, profile, l, objective),
        }
    }

    /// Every facility location that can occur.
    pub fn locations(&self) -> Vec<Rational> {
        match self {
            Self::Deterministic(p) => p.locations().to_vec(),
            Self::Randomized(l) => {
                l.support().iter().flat_map(|(p, _)| p.locations().iter().cloned()).collect()
            }
        }
    }
}

type MechanismFn = dyn Fn(&EntranceFee, &AgentProfile) -> Result<MechanismOutcome> + Send + Sync;

/// A user-supplied mechanism, e.g. a non-strategyproof control for audits.
#[derive(Clone)]
pub struct CustomMechanism {
    pub label: String,
    pub arity: usize,
    func: Arc<MechanismFn>,
}

impl CustomMechanism {
    pub fn new<F>(label: impl Into<String>, arity: usize, func: F) -> Self
    where
        F: Fn(&EntranceFee, &AgentProfile) -> Result<MechanismOutcome> + Send + Sync + 'static,
    {
        CustomMechanism { label: label.into(), arity, func: Arc::new(func) }
    }
}

impl fmt::Debug for CustomMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMechanism")
            .field("label", &self.label)
            .field("arity", &self.arity)
            .finish_non_exhaustive()
    }
}

/// Agent indices are 1-based positions in the sorted profile.
#[derive(Debug, Clone)]
pub enum Mechanism {
    /// `m_i`: the optimal location of the `i`-th agent.
    OptOfAgent(usize),
    /// `m_med`: the optimal location of agent `⌈n/2⌉`.
    OptOfMedian,
    /// `m_{i,j}`: facilities at `x_i*` and `x_j*`.
    OptPair(usize, usize),
    /// Lottery between `ℓ_tc` and `x_med*`.
    TwoPointRandomization,
    /// The (non-strategyproof) optimum, used as a reference and audit target.
    OptimalSolver {
        objective: Objective,
        m: usize,
    },
    Custom(CustomMechanism),
}

impl Mechanism {
    /// `m_{1,n}` for the given profile size is `OptPair(1, n)`; this variant
    /// resolves `n` at application time.
    pub fn first_last() -> Self {
        Mechanism::OptPair(1, usize::MAX)
    }

    pub fn arity(&self) -> usize {
        match self {
            Self::OptOfAgent(_) | Self::OptOfMedian | Self::TwoPointRandomization => 1,
            Self::OptPair(..) => 2,
            Self::OptimalSolver { m, .. } => *m,
            Self::Custom(c) => c.arity,
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, Self::TwoPointRandomization)
    }

    pub fn label(&self) -> String {
        match self {
            Self::OptOfAgent(i) => format!("m_{i}"),
            Self::OptOfMedian => "m_med".into(),
            Self::OptPair(1, usize::MAX) => "m_1n".into(),
            Self::OptPair(i, j) => format!("m_{i}_{j}"),
            Self::TwoPointRandomization => "trm".into(),
            Self::OptimalSolver { objective, m } => format!("opt_{}_{m}", objective.as_str()),
            Self::Custom(c) => c.label.clone(),
        }
    }

    /// Runs the mechanism on a reported profile.
    pub fn apply(&self, fee: &EntranceFee, profile: &AgentProfile) -> Result<MechanismOutcome> {
        use MechanismOutcome::*;
        match self {
            Self::OptOfAgent(i) => mech_mi(fee, profile, *i).map(Deterministic),
            Self::OptOfMedian => mech_med(fee, profile).map(Deterministic),
            Self::OptPair(i, j) => {
                let j = if *j == usize::MAX { profile.len() } else { *j };
                mech_mij(fee, profile, *i, j).map(Deterministic)
            }
            Self::TwoPointRandomization => mech_trm(fee, profile).map(Randomized),
            Self::OptimalSolver { objective, m } => {
                solve_multi(fee, profile, *m, *objective).map(|s| Deterministic(s.placement))
            }
            Self::Custom(c) => (c.func)(fee, profile),
        }
    }
}

/// `m_i`: a single facility at `x_i*`.
pub fn mech_mi(fee: &EntranceFee, profile: &AgentProfile, i: usize) -> Result<Placement> {
    let x = profile.sorted(i)?;
    Ok(Placement::single(optimal_location(fee, x)?.x_star))
}

/// `⌈n/2⌉`.
pub fn median_index(n: usize) -> usize {
    n.div_ceil(2)
}

/// `m_med`.
pub fn mech_med(fee: &EntranceFee, profile: &AgentProfile) -> Result<Placement> {
    mech_mi(fee, profile, median_index(profile.len()))
}

/// `m_{i,j}`: facilities at `x_i*` and `x_j*`.
pub fn mech_mij(fee: &EntranceFee, profile: &AgentProfile, i: usize, j: usize) -> Result<Placement> {
    if i > j {
        return Err(Error::BadIndex(i, profile.len()));
    }
    let a = optimal_location(fee, profile.sorted(i)?)?.x_star;
    let b = optimal_location(fee, profile.sorted(j)?)?.x_star;
    Placement::new(vec![a, b])
}

/// The point indifferent between lone facilities at `a` and `b`:
/// `|x - a| + e(a) = |x - b| + e(b)`, clamped into the segment between them
/// when one location is preferred along the whole segment.
pub fn critical_position(fee: &EntranceFee, a: &Rational, b: &Rational) -> Result<Rational> {
    if a == b {
        return Ok(a.clone());
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (Some(e_lo), Some(e_hi)) = (fee.eval(lo).finite().cloned(), fee.eval(hi).finite().cloned()) else {
        return Err(Error::Infeasible);
    };
    let x = (lo + hi + e_hi - e_lo) / Rational::from_integer(2.into());
    Ok(x.clamp(lo.clone(), hi.clone()))
}

/// Intermediate values of the two-point randomization mechanism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrmTrace {
    pub median_location: Rational,
    pub tc_location: Rational,
    pub critical: Rational,
    /// Agents weakly on the `ℓ_tc` side of the critical position.
    pub k: usize,
    pub n: usize,
}

impl TrmTrace {
    /// Probability of `ℓ_tc`, `k / n`.
    pub fn p_tc(&self) -> Rational {
        Rational::new(self.k.into(), self.n.into())
    }
}

pub fn trm_trace(fee: &EntranceFee, profile: &AgentProfile) -> Result<TrmTrace> {
    let median_location = mech_med(fee, profile)?.locations()[0].clone();
    let tc_location = solve_one_tc(fee, profile)?.placement.locations()[0].clone();
    let n = profile.len();
    if median_location == tc_location {
        return Ok(TrmTrace { critical: median_location.clone(), median_location, tc_location, k: n, n });
    }
    let critical = critical_position(fee, &median_location, &tc_location)?;
    // Agents exactly at the critical position count toward ℓ_tc.
    let k = if tc_location > median_location {
        profile.positions().iter().filter(|x| **x >= critical).count()
    } else {
        profile.positions().iter().filter(|x| **x <= critical).count()
    };
    Ok(TrmTrace { median_location, tc_location, critical, k, n })
}

/// Two-point randomization: `ℓ_tc` with probability `k/n`, `x_med*` otherwise.
pub fn mech_trm(fee: &EntranceFee, profile: &AgentProfile) -> Result<Lottery> {
    let t = trm_trace(fee, profile)?;
    if t.median_location == t.tc_location {
        return Ok(Lottery::certain(Placement::single(t.tc_location)));
    }
    let p = t.p_tc();
    let q = Rational::one() - &p;
    let mut support = Vec::with_capacity(2);
    if !p.is_zero() {
        support.push((Placement::single(t.tc_location), p));
    }
    if !q.is_zero() {
        support.push((Placement::single(t.median_location), q));
    }
    Lottery::new(support)
}
