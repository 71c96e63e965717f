//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::fee::{make_fee, EntranceFee};
use crate::game::make_profile;
use crate::number::{rat, ExtendedRational, Rational};
use crate::{Error, Result};

/// Sizes are drawn uniformly from `1..=max_*`; fees and positions are
/// multiples of `1/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomParams {
    pub max_agents: usize,
    pub max_facilities: usize,
    /// Breakpoints plus overrides, drawn from `0..=max_fee_points`.
    pub max_fee_points: usize,
    /// Fees lie in `[0, fee_max]`.
    pub fee_max: i64,
    /// Positions and fee points lie in `[-position_bound, position_bound]`.
    pub position_bound: i64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { max_agents: 8, max_facilities: 3, max_fee_points: 5, fee_max: 10, position_bound: 10 }
    }
}

impl RandomParams {
    fn validate(&self) -> Result<()> {
        if self.max_agents == 0 || self.max_facilities == 0 || self.fee_max < 0 || self.position_bound < 0 {
            return Err(Error::BadParams(format!("{self:?}")));
        }
        Ok(())
    }
}

fn half_step(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    rat(rng.random_range(2 * lo..=2 * hi), 2)
}

/// The `index`-th instance of the stream for `seed`.
pub fn random_instance(seed: u64, index: u64, params: &RandomParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let b = params.position_bound;
    let fee_value = |rng: &mut ChaCha8Rng| half_step(rng, 0, params.fee_max);

    let default = fee_value(&mut rng);
    let count = rng.random_range(0..=params.max_fee_points);
    let mut spots: Vec<Rational> = (0..count).map(|_| half_step(&mut rng, -b, b)).collect();
    spots.sort();
    spots.dedup();
    let mut breakpoints = Vec::new();
    let mut discounts = Vec::new();
    for p in spots {
        let v = fee_value(&mut rng);
        if rng.random_bool(0.5) {
            breakpoints.push((p, v));
        } else {
            discounts.push((p, v));
        }
    }
    let fee = lsc_fee(default, breakpoints, discounts)?;

    let n = rng.random_range(1..=params.max_agents);
    let xs: Vec<Rational> = (0..n).map(|_| half_step(&mut rng, -b, b)).collect();
    let m = rng.random_range(1..=params.max_facilities);
    Ok(Instance { id: format!("rand-{seed}-{index}"), fee, profile: make_profile(&xs)?, m })
}

/// Builds a valid fee: each override is capped at the fee on both sides of
/// its point, and every upward step gets an override at the step's level.
fn lsc_fee(
    default: Rational,
    breakpoints: Vec<(Rational, Rational)>,
    overrides: Vec<(Rational, Rational)>,
) -> Result<EntranceFee> {
    let piece =
        |x: &Rational| breakpoints.iter().rev().find(|(p, _)| p <= x).map_or(&default, |(_, v)| v).clone();
    let left =
        |x: &Rational| breakpoints.iter().rev().find(|(p, _)| p < x).map_or(&default, |(_, v)| v).clone();
    let mut fixed: Vec<(Rational, Rational)> = overrides
        .into_iter()
        .map(|(p, v)| {
            let cap = piece(&p).min(left(&p));
            (p.clone(), v.min(cap))
        })
        .collect();
    for (p, v) in &breakpoints {
        if *v > left(p) && !fixed.iter().any(|(q, _)| q == p) {
            fixed.push((p.clone(), left(p)));
        }
    }
    let fin = ExtendedRational::Finite;
    make_fee(
        fin(default.clone()),
        breakpoints.iter().map(|(p, v)| (p.clone(), fin(v.clone()))).collect(),
        fixed.into_iter().map(|(p, v)| (p, fin(v))).collect(),
    )
}

/// `count` consecutive instances of one seed.
pub fn random_suite(seed: u64, count: usize, params: &RandomParams) -> Result<Vec<Instance>> {
    (0..count as u64).map(|i| random_instance(seed, i, params)).collect()
}
