//! Optimal facility placement.
//!
//! One facility is solved by splitting `[x_1*, x_n*]` at agent positions and
//! minimizing an affine function of `(e(ℓ), ℓ)` on each piece. Several
//! facilities are solved by a dynamic program over contiguous agent groups.
//! [`brute_force_opt`] is an independent oracle that shares none of that code.

use std::cmp::Reverse;

use num_traits::Zero;

use crate::fee::EntranceFee;
use crate::game::{objective_value, optimal_location, AgentProfile, Objective, Placement};
use crate::number::{dist, ExtendedRational, Rational};
use crate::{Error, Result};

/// Default agent limit for [`brute_force_opt`].
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// An optimal placement with the contiguous groups it serves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub placement: Placement,
    /// 1-based inclusive ranges over the sorted profile, one per group.
    pub partition: Vec<(usize, usize)>,
    pub value: ExtendedRational,
}

/// Ranking of candidate single locations: value, then fee, then rightmost.
fn better(fee: &EntranceFee, a: &(Rational, ExtendedRational), b: &(Rational, ExtendedRational)) -> bool {
    let fa = fee.eval(&a.0);
    let fb = fee.eval(&b.0);
    (&a.1, &fa, Reverse(&a.0)) < (&b.1, &fb, Reverse(&b.0))
}

fn pick_best(
    fee: &EntranceFee,
    candidates: impl IntoIterator<Item = (Rational, ExtendedRational)>,
) -> Result<(Rational, ExtendedRational)> {
    let mut best: Option<(Rational, ExtendedRational)> = None;
    for c in candidates {
        if best.as_ref().is_none_or(|b| better(fee, &c, b)) {
            best = Some(c);
        }
    }
    match best {
        Some(b) if b.1.is_finite() => Ok(b),
        _ => Err(Error::Infeasible),
    }
}

/// `[x_1*, x_n*]`, which contains both single-facility optima.
fn search_window(fee: &EntranceFee, xs: &[Rational]) -> Result<(Rational, Rational)> {
    let lo = optimal_location(fee, &xs[0])?.x_star;
    let hi = optimal_location(fee, &xs[xs.len() - 1])?.x_star;
    Ok((lo, hi))
}

fn one_facility(loc: Rational, value: ExtendedRational, n: usize) -> Solution {
    Solution { placement: Placement::single(loc), partition: vec![(1, n)], value }
}

/// Location minimizing total cost for one facility.
pub fn solve_one_tc(fee: &EntranceFee, profile: &AgentProfile) -> Result<Solution> {
    let xs = profile.positions();
    let n = xs.len();
    let (lo, hi) = search_window(fee, xs)?;

    // Piece boundaries: the window ends and every agent strictly inside it.
    let mut cuts = vec![lo.clone()];
    cuts.extend(xs.iter().filter(|x| **x > lo && **x < hi).cloned());
    cuts.push(hi.clone());
    cuts.dedup();

    let total: Rational = xs.iter().sum();
    let n_i = i64::try_from(n).expect("agent count fits i64");
    let segments: Vec<(&Rational, &Rational)> = if cuts.len() == 1 {
        vec![(&cuts[0], &cuts[0])]
    } else {
        cuts.windows(2).map(|w| (&w[0], &w[1])).collect()
    };
    let mut candidates = Vec::with_capacity(segments.len());
    for (s, t) in segments {
        // Agents at or left of s are left of every ℓ in [s, t].
        let k = xs.partition_point(|x| x <= s);
        let left_sum: Rational = xs[..k].iter().sum();
        let constant = &total - &left_sum - &left_sum;
        let slope = 2 * i64::try_from(k).expect("fits") - n_i;
        let (loc, val) = fee.min_affine(n_i, slope, s, t)?;
        candidates.push((loc, val.shift(&constant)));
    }
    let (loc, value) = pick_best(fee, candidates)?;
    debug_assert_eq!(
        objective_value(fee, profile, &Placement::single(loc.clone()), Objective::Tc).ok(),
        Some(value.clone())
    );
    Ok(one_facility(loc, value, n))
}

/// Location minimizing maximum cost for one facility. Only the extreme agents
/// matter: left of the midpoint of `x_1, x_n` the farthest agent is `x_n`,
/// right of it `x_1`.
pub fn solve_one_mc(fee: &EntranceFee, profile: &AgentProfile) -> Result<Solution> {
    let xs = profile.positions();
    let (first, last) = (&xs[0], &xs[xs.len() - 1]);
    let (lo, hi) = search_window(fee, xs)?;
    let mid = (first + last) / Rational::from_integer(2.into());

    let mut candidates = Vec::with_capacity(2);
    if lo <= mid {
        let right_end = if hi < mid { &hi } else { &mid };
        let (loc, val) = fee.min_affine(1, -1, &lo, right_end)?;
        candidates.push((loc, val.shift(last)));
    }
    if hi >= mid {
        let left_end = if lo > mid { &lo } else { &mid };
        let (loc, val) = fee.min_affine(1, 1, left_end, &hi)?;
        candidates.push((loc, val.shift(&-first)));
    }
    let (loc, value) = pick_best(fee, candidates)?;
    Ok(one_facility(loc, value, xs.len()))
}

pub fn solve_one(fee: &EntranceFee, profile: &AgentProfile, objective: Objective) -> Result<Solution> {
    match objective {
        Objective::Tc => solve_one_tc(fee, profile),
        Objective::Mc => solve_one_mc(fee, profile),
    }
}

/// Optimal single facility for sorted agents `i..=j` (1-based); the returned
/// partition is `[(i, j)]`.
pub fn group_opt(
    fee: &EntranceFee,
    profile: &AgentProfile,
    i: usize,
    j: usize,
    objective: Objective,
) -> Result<Solution> {
    let sub = profile.range(i, j)?;
    let mut sol = solve_one(fee, &sub, objective)?;
    sol.partition = vec![(i, j)];
    Ok(sol)
}

/// Memo of the multi-facility dynamic program.
///
/// `opt(i, j, k)` is the best value for agents `1..=j` split into `k`
/// contiguous groups whose last group starts at some index `≤ i`.
#[derive(Debug, Clone)]
pub struct DpTable {
    n: usize,
    groups: usize,
    memo: Vec<ExtendedRational>,
    /// Whether the optimum at `(i, j, k)` starts the last group exactly at `i`.
    starts_here: Vec<bool>,
}

impl DpTable {
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * (self.n + 1) + j) * (self.n + 1) + i
    }

    pub fn opt(&self, i: usize, j: usize, k: usize) -> &ExtendedRational {
        &self.memo[self.index(i, j, k)]
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    /// The table's optimum, `opt(n, n, groups)`.
    pub fn optimum(&self) -> &ExtendedRational {
        self.opt(self.n, self.n, self.groups)
    }
}

/// Optimal placement of `m` facilities.
pub fn solve_multi(
    fee: &EntranceFee,
    profile: &AgentProfile,
    m: usize,
    objective: Objective,
) -> Result<Solution> {
    solve_multi_with_table(fee, profile, m, objective).map(|(s, _)| s)
}

/// [`solve_multi`] that also returns the filled table.
///
/// Splitting a group never raises the optimum, so with `m > n` the program
/// runs with `n` groups and the placement repeats its last location.
pub fn solve_multi_with_table(
    fee: &EntranceFee,
    profile: &AgentProfile,
    m: usize,
    objective: Objective,
) -> Result<(Solution, DpTable)> {
    if m == 0 {
        return Err(Error::BadParams("need at least one facility".into()));
    }
    let n = profile.len();
    let groups = m.min(n);

    // v[i][j]: best single facility for agents i..=j.
    let mut v: Vec<Vec<Option<Solution>>> = vec![vec![None; n + 1]; n + 1];
    for (i, row) in v.iter_mut().enumerate().skip(1) {
        for (j, cell) in row.iter_mut().enumerate().skip(i) {
            *cell = Some(group_opt(fee, profile, i, j, objective)?);
        }
    }
    let group_value = |i: usize, j: usize| &v[i][j].as_ref().expect("filled").value;
    let combine = |prefix: &ExtendedRational, group: &ExtendedRational| match objective {
        Objective::Tc => prefix + group,
        Objective::Mc => prefix.max(group).clone(),
    };

    let size = (groups + 1) * (n + 1) * (n + 1);
    let mut table =
        DpTable { n, groups, memo: vec![ExtendedRational::Infinity; size], starts_here: vec![false; size] };
    let zero = table.index(0, 0, 0);
    table.memo[zero] = ExtendedRational::zero();
    for k in 1..=groups {
        for j in 1..=n {
            for i in 1..=j {
                let earlier = table.opt(i - 1, j, k).clone();
                let here = combine(table.opt(i - 1, i - 1, k - 1), group_value(i, j));
                let idx = table.index(i, j, k);
                // On ties keep the earlier start.
                if here < earlier {
                    table.memo[idx] = here;
                    table.starts_here[idx] = true;
                } else {
                    table.memo[idx] = earlier;
                }
            }
        }
    }
    if table.optimum().is_infinite() {
        return Err(Error::Infeasible);
    }

    let mut partition = Vec::with_capacity(groups);
    let (mut i, mut j, mut k) = (n, n, groups);
    while k > 0 {
        if table.starts_here[table.index(i, j, k)] {
            partition.push((i, j));
            j = i - 1;
            i -= 1;
            k -= 1;
        } else {
            i -= 1;
        }
    }
    partition.reverse();

    let mut locations: Vec<Rational> = partition
        .iter()
        .map(|&(a, b)| v[a][b].as_ref().expect("filled").placement.locations()[0].clone())
        .collect();
    let pad = locations[locations.len() - 1].clone();
    locations.resize(m, pad);
    let placement = Placement::new(locations)?;
    // Agents choose freely; on a group boundary that can only happen at equal
    // cost, so the recomputed value matches the table.
    let value = objective_value(fee, profile, &placement, objective)?;
    debug_assert_eq!(&value, table.optimum());
    Ok((Solution { placement, partition, value }, table))
}

/// Exhaustive oracle: every contiguous partition into `min(m, n)` groups, each
/// group solved by scanning a dense candidate set (fee points, agent
/// positions and all pairwise agent midpoints).
pub fn brute_force_opt(
    fee: &EntranceFee,
    profile: &AgentProfile,
    m: usize,
    objective: Objective,
) -> Result<Solution> {
    brute_force_opt_limited(fee, profile, m, objective, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_opt_limited(
    fee: &EntranceFee,
    profile: &AgentProfile,
    m: usize,
    objective: Objective,
    limit: usize,
) -> Result<Solution> {
    let n = profile.len();
    if n > limit {
        return Err(Error::TooLarge(format!("{n} agents exceeds brute-force limit {limit}")));
    }
    if m == 0 {
        return Err(Error::BadParams("need at least one facility".into()));
    }
    let groups = m.min(n);
    let xs = profile.positions();

    type Candidate = (ExtendedRational, Vec<(usize, usize)>, Vec<Rational>);
    let mut best: Option<Candidate> = None;
    for cuts in combinations(n - 1, groups - 1) {
        let mut bounds = Vec::with_capacity(groups);
        let mut start = 1;
        for c in cuts.iter().chain(std::iter::once(&n)) {
            bounds.push((start, *c));
            start = c + 1;
        }
        let mut value = ExtendedRational::zero();
        let mut locations = Vec::with_capacity(groups);
        for &(a, b) in &bounds {
            let (loc, v) = dense_group_opt(fee, &xs[a - 1..b], objective);
            value = match objective {
                Objective::Tc => value + v,
                Objective::Mc => value.max(v),
            };
            locations.push(loc);
        }
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, bounds, locations));
        }
    }
    let (value, partition, mut locations) = best.expect("at least one partition");
    if value.is_infinite() {
        return Err(Error::Infeasible);
    }
    let pad = locations[locations.len() - 1].clone();
    locations.resize(m, pad);
    Ok(Solution { placement: Placement::new(locations)?, partition, value })
}

/// All increasing `r`-subsets of `1..=n`.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..=n {
            cur.push(c);
            go(c + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, r, &mut Vec::with_capacity(r), &mut out);
    out
}

fn dense_group_opt(fee: &EntranceFee, xs: &[Rational], objective: Objective) -> (Rational, ExtendedRational) {
    let two = Rational::from_integer(2.into());
    let mut candidates: Vec<Rational> = fee.points().to_vec();
    candidates.extend(xs.iter().cloned());
    for (a, x) in xs.iter().enumerate() {
        for y in &xs[a + 1..] {
            candidates.push((x + y) / &two);
        }
    }
    candidates.sort();
    candidates.dedup();

    let mut best: Option<(ExtendedRational, ExtendedRational, Rational)> = None;
    for loc in candidates {
        let f = fee.eval(&loc);
        let value = match objective {
            Objective::Tc => {
                let travel: Rational = xs.iter().map(|x| dist(x, &loc)).sum();
                let count = Rational::from_integer(xs.len().into());
                f.scale(&count).shift(&travel)
            }
            Objective::Mc => {
                let far = xs.iter().map(|x| dist(x, &loc)).max().unwrap_or_else(Rational::zero);
                f.clone().shift(&far)
            }
        };
        // Candidates ascend, so `<=` on (value, fee) keeps the rightmost tie.
        if best.as_ref().is_none_or(|b| (&value, &f) <= (&b.0, &b.1)) {
            best = Some((value, f, loc));
        }
    }
    let (value, _, loc) = best.expect("candidates non-empty");
    (loc, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::make_profile;
    use crate::number::{int, rat};

    fn fin(n: i64) -> ExtendedRational {
        ExtendedRational::from_int(n)
    }

    fn discount(default: i64, at: i64, fee: i64) -> EntranceFee {
        EntranceFee::with_overrides(fin(default), vec![(int(at), fin(fee))]).unwrap()
    }

    fn profile(xs: &[i64]) -> AgentProfile {
        make_profile(&xs.iter().map(|&v| int(v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn solve_one_tc_examples() {
        let s = solve_one_tc(&discount(4, 3, 1), &profile(&[0, 3])).unwrap();
        assert_eq!((s.placement.locations()[0].clone(), s.value), (int(3), fin(5)));

        for c in [0, 1, 7] {
            let s = solve_one_tc(&EntranceFee::constant(fin(c)).unwrap(), &profile(&[0, 2, 10])).unwrap();
            assert_eq!(s.placement.locations()[0], int(2));
            assert_eq!(s.value, fin(10 + 3 * c));
        }

        let s = solve_one_tc(&discount(4, 4, 1), &profile(&[0, 4])).unwrap();
        assert_eq!((s.placement.locations()[0].clone(), s.value), (int(4), fin(6)));
    }

    #[test]
    fn solve_one_mc_examples() {
        let s = solve_one_mc(&discount(4, 4, 1), &profile(&[0, 8])).unwrap();
        assert_eq!((s.placement.locations()[0].clone(), s.value), (int(4), fin(5)));
        let s = solve_one_mc(&EntranceFee::constant(fin(0)).unwrap(), &profile(&[0, 2])).unwrap();
        assert_eq!((s.placement.locations()[0].clone(), s.value), (int(1), fin(1)));
        let s = solve_one_mc(&EntranceFee::constant(fin(5)).unwrap(), &profile(&[0, 2])).unwrap();
        assert_eq!((s.placement.locations()[0].clone(), s.value), (int(1), fin(6)));
    }

    #[test]
    fn group_opt_examples() {
        let f = discount(4, 3, 1);
        let s = group_opt(&f, &profile(&[0, 3]), 1, 2, Objective::Tc).unwrap();
        assert_eq!(s.value, fin(5));
        let zero = EntranceFee::constant(fin(0)).unwrap();
        let p = profile(&[0, 4, 9]);
        for i in 1..=3 {
            assert_eq!(group_opt(&zero, &p, i, i, Objective::Tc).unwrap().value, fin(0));
        }
        let one = EntranceFee::constant(fin(1)).unwrap();
        let s = group_opt(&one, &profile(&[0, 4]), 1, 2, Objective::Mc).unwrap();
        assert_eq!((s.placement.locations()[0].clone(), s.value), (int(2), fin(3)));
        assert_eq!(group_opt(&one, &p, 2, 4, Objective::Tc).unwrap_err(), Error::BadRange(2, 4, 3));
    }

    #[test]
    fn solve_multi_examples() {
        let one = EntranceFee::constant(fin(1)).unwrap();
        let s = solve_multi(&one, &profile(&[0, 1, 9, 10]), 2, Objective::Tc).unwrap();
        assert_eq!(s.value, fin(6));
        assert_eq!(s.partition, vec![(1, 2), (3, 4)]);

        let zero = EntranceFee::constant(fin(0)).unwrap();
        let s = solve_multi(&zero, &profile(&[0, 10]), 2, Objective::Tc).unwrap();
        assert_eq!(s.value, fin(0));
        assert_eq!(s.placement.locations(), &[int(0), int(10)]);

        let f = discount(4, 3, 1);
        let p = profile(&[0, 3, 5]);
        for obj in [Objective::Tc, Objective::Mc] {
            assert_eq!(solve_multi(&f, &p, 1, obj).unwrap(), solve_one(&f, &p, obj).unwrap());
        }
    }

    #[test]
    fn solve_multi_pads_extra_facilities() {
        let zero = EntranceFee::constant(fin(0)).unwrap();
        let s = solve_multi(&zero, &profile(&[0, 10]), 4, Objective::Mc).unwrap();
        assert_eq!(s.value, fin(0));
        assert_eq!(s.placement.len(), 4);
        assert_eq!(s.partition, vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn brute_force_examples() {
        let zero = EntranceFee::constant(fin(0)).unwrap();
        let p = profile(&[0, 3, 7]);
        assert_eq!(brute_force_opt(&zero, &p, 3, Objective::Tc).unwrap().value, fin(0));
        let f = discount(4, 3, 1);
        for obj in [Objective::Tc, Objective::Mc] {
            assert_eq!(brute_force_opt(&f, &p, 1, obj).unwrap().value, solve_one(&f, &p, obj).unwrap().value);
        }
        let big = profile(&[0; 11]);
        assert!(matches!(brute_force_opt(&zero, &big, 2, Objective::Tc), Err(Error::TooLarge(_))));
    }

    #[test]
    fn one_facility_tc_with_infinite_regions() {
        let g = EntranceFee::with_overrides(
            ExtendedRational::Infinity,
            vec![(int(-1), fin(0)), (int(1), fin(0))],
        )
        .unwrap();
        let p = make_profile(&[rat(-1, 100), int(1)]).unwrap();
        let s = solve_one_tc(&g, &p).unwrap();
        assert_eq!(s.placement.locations()[0], int(1));
        assert_eq!(s.value, ExtendedRational::Finite(rat(101, 100)));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
