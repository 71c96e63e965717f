//! Strategyproofness checks over a finite deviation grid.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::fee::EntranceFee;
use crate::game::{AgentProfile, Placement};
use crate::mechanism::{CustomMechanism, Mechanism, MechanismOutcome};
use crate::number::{int, ExtendedRational, Rational};
use crate::{Error, Result};

/// Work cap for [`check_group_sp`], counted in mechanism evaluations.
pub const GROUP_SP_LIMIT: u64 = 5_000_000;

/// Candidate misreports. An agent's own position is always implicitly allowed
/// (it is the truthful report and never produces a violation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationGrid {
    points: Vec<Rational>,
}

impl DeviationGrid {
    /// Agent positions, fee points, pairwise agent midpoints, and each agent
    /// position and fee point shifted by every offset in either direction.
    pub fn default_for(fee: &EntranceFee, profile: &AgentProfile) -> Self {
        Self::with_offsets(fee, profile, &[int(1)])
    }

    pub fn with_offsets(fee: &EntranceFee, profile: &AgentProfile, offsets: &[Rational]) -> Self {
        let xs = profile.positions();
        let mut anchors: Vec<Rational> = xs.iter().chain(fee.points()).cloned().collect();
        anchors.sort();
        anchors.dedup();
        let mut points = anchors.clone();
        let two = int(2);
        for (a, x) in xs.iter().enumerate() {
            for y in &xs[a + 1..] {
                points.push((x + y) / &two);
            }
        }
        for p in &anchors {
            for d in offsets {
                points.push(p + d);
                points.push(p - d);
            }
        }
        Self::from_points(points)
    }

    /// No deviation at all.
    pub fn truthful_only() -> Self {
        DeviationGrid { points: Vec::new() }
    }

    pub fn from_points(mut points: Vec<Rational>) -> Self {
        points.sort();
        points.dedup();
        DeviationGrid { points }
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn misreports<'a>(&'a self, truth: &'a Rational) -> impl Iterator<Item = &'a Rational> + 'a {
        self.points.iter().filter(move |p| *p != truth)
    }
}

/// A coalition whose every member strictly gains by the joint misreport.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Original (input-order) agent indices, 0-based.
    pub coalition: Vec<usize>,
    /// True positions in input order.
    pub true_profile: Vec<Rational>,
    /// `(agent, reported position)` for each coalition member.
    pub misreports: Vec<(usize, Rational)>,
    pub cost_before: Vec<ExtendedRational>,
    pub cost_after: Vec<ExtendedRational>,
}

/// Memoizes mechanism outcomes by the sorted reported multiset; every
/// mechanism here sees reports only through the sorted profile.
struct Evaluator<'a> {
    mechanism: &'a Mechanism,
    fee: &'a EntranceFee,
    cache: RefCell<HashMap<Vec<Rational>, MechanismOutcome>>,
}

impl<'a> Evaluator<'a> {
    fn new(mechanism: &'a Mechanism, fee: &'a EntranceFee) -> Self {
        Evaluator { mechanism, fee, cache: RefCell::new(HashMap::new()) }
    }

    fn outcome(&self, profile: &AgentProfile) -> Result<MechanismOutcome> {
        let key = profile.positions().to_vec();
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let out = self.mechanism.apply(self.fee, profile)?;
        self.cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }
}

/// Single-agent deviations on the grid where the deviator strictly gains.
pub fn check_sp(
    mechanism: &Mechanism,
    fee: &EntranceFee,
    profile: &AgentProfile,
    grid: &DeviationGrid,
) -> Result<Vec<Violation>> {
    check_coalitions(&Evaluator::new(mechanism, fee), fee, profile, grid, 1)
}

/// Coalitions of size `1..=max_coalition` where every member strictly gains.
pub fn check_group_sp(
    mechanism: &Mechanism,
    fee: &EntranceFee,
    profile: &AgentProfile,
    grid: &DeviationGrid,
    max_coalition: usize,
) -> Result<Vec<Violation>> {
    let work = group_work(profile.len(), grid.len(), max_coalition);
    if work > GROUP_SP_LIMIT {
        return Err(Error::TooLarge(format!(
            "{work} mechanism evaluations for coalitions up to {max_coalition}"
        )));
    }
    check_coalitions(&Evaluator::new(mechanism, fee), fee, profile, grid, max_coalition)
}

fn group_work(n: usize, g: usize, max_coalition: usize) -> u64 {
    let mut total = 0u64;
    let mut choose = 1u64;
    let mut power = 1u64;
    for s in 1..=max_coalition.min(n) {
        choose = choose * (n + 1 - s) as u64 / s as u64;
        power = power.saturating_mul(g as u64);
        total = total.saturating_add(choose.saturating_mul(power));
    }
    total
}

fn check_coalitions(
    eval: &Evaluator<'_>,
    fee: &EntranceFee,
    profile: &AgentProfile,
    grid: &DeviationGrid,
    max_coalition: usize,
) -> Result<Vec<Violation>> {
    let truth = profile.reported();
    let honest = eval.outcome(profile)?;
    let before: Vec<ExtendedRational> = truth.iter().map(|x| honest.agent_cost(fee, x)).collect();
    let mut found = Vec::new();
    for size in 1..=max_coalition.min(truth.len()) {
        for coalition in subsets(truth.len(), size) {
            let options: Vec<Vec<&Rational>> =
                coalition.iter().map(|&i| grid.misreports(&truth[i]).collect()).collect();
            for choice in product(&options) {
                let changes: Vec<(usize, Rational)> =
                    coalition.iter().zip(&choice).map(|(&i, r)| (i, (*r).clone())).collect();
                let out = eval.outcome(&profile.with_reports(&changes))?;
                let after: Vec<ExtendedRational> =
                    coalition.iter().map(|&i| out.agent_cost(fee, &truth[i])).collect();
                if coalition.iter().zip(&after).all(|(&i, a)| *a < before[i]) {
                    found.push(Violation {
                        coalition: coalition.clone(),
                        true_profile: truth.clone(),
                        misreports: changes,
                        cost_before: coalition.iter().map(|&i| before[i].clone()).collect(),
                        cost_after: after,
                    });
                }
            }
        }
    }
    Ok(found)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn product<'a, T>(options: &[Vec<&'a T>]) -> Vec<Vec<&'a T>> {
    options.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut next = prefix.clone();
                    next.push(*o);
                    next
                })
            })
            .collect()
    })
}

/// Facility at the average report. Not strategyproof; used as a control.
pub fn mean_mechanism() -> Mechanism {
    Mechanism::Custom(CustomMechanism::new("mean", 1, |_fee, profile| {
        let n = Rational::from_integer(profile.len().into());
        let sum: Rational = profile.positions().iter().sum();
        Ok(MechanismOutcome::Deterministic(Placement::single(sum / n)))
    }))
}
