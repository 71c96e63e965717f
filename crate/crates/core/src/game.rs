//! Agents, facility placements and the cost model.

use std::cmp::Reverse;

use num_traits::{One, Signed, Zero};

use crate::fee::EntranceFee;
use crate::number::{dist, ExtendedRational, Rational};
use crate::{Error, Result};

/// Utilitarian (total cost) or egalitarian (maximum cost) objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Tc,
    Mc,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Tc => "tc",
            Objective::Mc => "mc",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tc" => Ok(Objective::Tc),
            "mc" => Ok(Objective::Mc),
            other => Err(Error::BadParams(format!("unknown objective {other:?}"))),
        }
    }
}

/// Agent positions sorted ascending, remembering each agent's reported index.
///
/// Agents at equal positions stay distinct and keep their reported order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgentProfile {
    positions: Vec<Rational>,
    perm: Vec<usize>,
}

pub fn make_profile(reported: &[Rational]) -> Result<AgentProfile> {
    if reported.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let mut perm: Vec<usize> = (0..reported.len()).collect();
    perm.sort_by(|&a, &b| reported[a].cmp(&reported[b]));
    let positions = perm.iter().map(|&i| reported[i].clone()).collect();
    Ok(AgentProfile { positions, perm })
}

impl AgentProfile {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Sorted positions.
    pub fn positions(&self) -> &[Rational] {
        &self.positions
    }

    /// `perm()[k]` is the reported index of the `k`-th smallest agent.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Position of the `i`-th smallest agent, 1-based.
    pub fn sorted(&self, i: usize) -> Result<&Rational> {
        if i == 0 || i > self.len() {
            return Err(Error::BadIndex(i, self.len()));
        }
        Ok(&self.positions[i - 1])
    }

    /// Positions in the order they were reported.
    pub fn reported(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.len()];
        for (k, &i) in self.perm.iter().enumerate() {
            out[i] = self.positions[k].clone();
        }
        out
    }

    /// Profile after the agents at the given reported indices change their reports.
    pub fn with_reports(&self, changes: &[(usize, Rational)]) -> AgentProfile {
        let mut reported = self.reported();
        for (i, x) in changes {
            reported[*i] = x.clone();
        }
        make_profile(&reported).expect("non-empty")
    }

    /// Sub-profile of sorted agents `i..=j` (1-based).
    pub fn range(&self, i: usize, j: usize) -> Result<AgentProfile> {
        if i == 0 || i > j || j > self.len() {
            return Err(Error::BadRange(i, j, self.len()));
        }
        make_profile(&self.positions[i - 1..j])
    }
}

/// Facility locations; facility `j` sits at `locations[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    locations: Vec<Rational>,
}

impl Placement {
    pub fn new(locations: Vec<Rational>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::EmptyPlacement);
        }
        Ok(Placement { locations })
    }

    pub fn single(location: Rational) -> Self {
        Placement { locations: vec![location] }
    }

    pub fn locations(&self) -> &[Rational] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// True when at least one facility charges a finite fee.
    pub fn is_feasible(&self, fee: &EntranceFee) -> bool {
        self.locations.iter().any(|l| fee.eval(l).is_finite())
    }
}

/// A finite distribution over placements with a common facility count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lottery {
    support: Vec<(Placement, Rational)>,
}

impl Lottery {
    pub fn new(support: Vec<(Placement, Rational)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidLottery(m.to_string()));
        let Some(first) = support.first() else {
            return bad("empty support");
        };
        let m = first.0.len();
        if support.iter().any(|(p, _)| p.len() != m) {
            return bad("placements differ in facility count");
        }
        if support.iter().any(|(_, q)| q.is_negative()) {
            return bad("negative probability");
        }
        let total: Rational = support.iter().map(|(_, q)| q).sum();
        if !total.is_one() {
            return bad("probabilities do not sum to 1");
        }
        Ok(Lottery { support })
    }

    pub fn certain(placement: Placement) -> Self {
        Lottery { support: vec![(placement, Rational::one())] }
    }

    pub fn support(&self) -> &[(Placement, Rational)] {
        &self.support
    }

    /// Number of facilities in every placement.
    pub fn arity(&self) -> usize {
        self.support[0].0.len()
    }

    /// Expectation of a per-placement quantity, skipping zero-probability entries.
    fn expect<F>(&self, mut f: F) -> Result<ExtendedRational>
    where
        F: FnMut(&Placement) -> Result<ExtendedRational>,
    {
        let mut acc = ExtendedRational::zero();
        for (placement, q) in &self.support {
            if q.is_zero() {
                continue;
            }
            acc += &f(placement)?.scale(q);
        }
        Ok(acc)
    }
}

/// The facility an agent uses and what it pays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentChoice {
    pub cost: ExtendedRational,
    pub facility_index: usize,
    pub fee_paid: ExtendedRational,
    pub travel: Rational,
}

/// `|x - ℓ| + e(ℓ)`.
pub fn location_cost(fee: &EntranceFee, x: &Rational, location: &Rational) -> ExtendedRational {
    fee.eval(location).shift(&dist(x, location))
}

/// Cheapest facility for an agent at `x`. Ties go to the smaller entrance fee,
/// then to the rightmost facility, then to the lower facility index.
pub fn agent_cost(fee: &EntranceFee, x: &Rational, placement: &Placement) -> AgentChoice {
    let (facility_index, cost, fee_paid) = placement
        .locations
        .iter()
        .enumerate()
        .map(|(j, l)| {
            let f = fee.eval(l);
            (j, f.shift(&dist(x, l)), f)
        })
        .min_by(|a, b| {
            let la = &placement.locations[a.0];
            let lb = &placement.locations[b.0];
            (&a.1, &a.2, Reverse(la), a.0).cmp(&(&b.1, &b.2, Reverse(lb), b.0))
        })
        .expect("placement is non-empty");
    let travel = dist(x, &placement.locations[facility_index]);
    AgentChoice { cost, facility_index, fee_paid, travel }
}

fn ensure_feasible(fee: &EntranceFee, placement: &Placement) -> Result<()> {
    if placement.is_feasible(fee) {
        Ok(())
    } else {
        Err(Error::Infeasible)
    }
}

/// `TC(x, ℓ)`.
pub fn total_cost(
    fee: &EntranceFee,
    profile: &AgentProfile,
    placement: &Placement,
) -> Result<ExtendedRational> {
    ensure_feasible(fee, placement)?;
    Ok(profile.positions().iter().map(|x| agent_cost(fee, x, placement).cost).sum())
}

/// `MC(x, ℓ)`.
pub fn max_cost(
    fee: &EntranceFee,
    profile: &AgentProfile,
    placement: &Placement,
) -> Result<ExtendedRational> {
    ensure_feasible(fee, placement)?;
    Ok(profile
        .positions()
        .iter()
        .map(|x| agent_cost(fee, x, placement).cost)
        .max()
        .expect("profile is non-empty"))
}

pub fn objective_value(
    fee: &EntranceFee,
    profile: &AgentProfile,
    placement: &Placement,
    objective: Objective,
) -> Result<ExtendedRational> {
    match objective {
        Objective::Tc => total_cost(fee, profile, placement),
        Objective::Mc => max_cost(fee, profile, placement),
    }
}

/// Expected cost of an agent at `x` under a lottery.
pub fn expected_agent_cost(fee: &EntranceFee, x: &Rational, lottery: &Lottery) -> ExtendedRational {
    lottery.expect(|p| Ok(agent_cost(fee, x, p).cost)).expect("agent cost is infallible")
}

pub fn expected_total_cost(
    fee: &EntranceFee,
    profile: &AgentProfile,
    lottery: &Lottery,
) -> Result<ExtendedRational> {
    lottery.expect(|p| total_cost(fee, profile, p))
}

/// `E[MC]`: the expectation of the maximum, not the maximum of expectations.
pub fn expected_max_cost(
    fee: &EntranceFee,
    profile: &AgentProfile,
    lottery: &Lottery,
) -> Result<ExtendedRational> {
    lottery.expect(|p| max_cost(fee, profile, p))
}

pub fn expected_objective(
    fee: &EntranceFee,
    profile: &AgentProfile,
    lottery: &Lottery,
    objective: Objective,
) -> Result<ExtendedRational> {
    lottery.expect(|p| objective_value(fee, profile, p, objective))
}

/// The cost-minimizing single location `x*` for an agent at `x` and its cost `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalLocation {
    pub x_star: Rational,
    pub optimal_cost: ExtendedRational,
}

/// `x* = argmin_ℓ |x - ℓ| + e(ℓ)`, ties to the smaller fee, then rightmost.
///
/// With a finite `e(x)` the search is confined to `[x - e(x), x + e(x)]`;
/// anything farther costs more than staying at `x`. With `e(x) = +∞` the
/// search spans every breakpoint and override.
pub fn optimal_location(fee: &EntranceFee, x: &Rational) -> Result<OptimalLocation> {
    let (lo, hi) = match fee.eval(x) {
        ExtendedRational::Finite(r) => (x - &r, x + &r),
        ExtendedRational::Infinity => {
            let pts = fee.points();
            let lo = pts.first().map_or(x, |p| p.min(x)).clone();
            let hi = pts.last().map_or(x, |p| p.max(x)).clone();
            (lo, hi)
        }
    };
    // Left of x the cost is e(ℓ) - ℓ + x, right of x it is e(ℓ) + ℓ - x.
    let (l_loc, l_val) = fee.min_affine(1, -1, &lo, x)?;
    let (r_loc, r_val) = fee.min_affine(1, 1, x, &hi)?;
    let left = (l_val.shift(x), fee.eval(&l_loc), l_loc);
    let right = (r_val.shift(&-x), fee.eval(&r_loc), r_loc);
    let best = if (&right.0, &right.1, Reverse(&right.2)) <= (&left.0, &left.1, Reverse(&left.2)) {
        right
    } else {
        left
    };
    if best.0.is_infinite() {
        return Err(Error::Infeasible);
    }
    Ok(OptimalLocation { x_star: best.2, optimal_cost: best.0 })
}

/// Whether every agent weakly prefers a lone facility at `l1` over one at `l2`.
pub fn dominates(fee: &EntranceFee, profile: &AgentProfile, l1: &Rational, l2: &Rational) -> bool {
    profile.positions().iter().all(|x| location_cost(fee, x, l1) <= location_cost(fee, x, l2))
}
