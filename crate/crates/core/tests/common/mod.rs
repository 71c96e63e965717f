#![allow(dead_code)]

use feeloc::{make_fee, make_profile, rat, AgentProfile, EntranceFee, ExtendedRational, Rational};
use proptest::prelude::*;

pub fn half(k: i64) -> Rational {
    rat(k, 2)
}

pub fn fin(v: Rational) -> ExtendedRational {
    ExtendedRational::Finite(v)
}

/// Positions on the half grid in `[-12, 12]`.
pub fn position() -> impl Strategy<Value = Rational> {
    (-24i64..=24).prop_map(half)
}

fn fee_value() -> impl Strategy<Value = Rational> {
    (0i64..=20).prop_map(half)
}

/// Lower semi-continuous fees: breakpoints anywhere, overrides only lower the
/// fee, and every upward step carries an override at the lower level.
/// Roughly one fee in eight has an infinite default.
pub fn fee() -> impl Strategy<Value = EntranceFee> {
    (
        prop::option::weighted(0.875, fee_value()),
        prop::collection::vec((-20i64..=20, fee_value(), any::<bool>()), 0..=5),
    )
        .prop_map(|(default, raw)| {
            let default = default.map_or(ExtendedRational::Infinity, fin);
            let mut raw = raw;
            raw.sort_by_key(|r| r.0);
            raw.dedup_by_key(|r| r.0);
            let mut breaks: Vec<(Rational, ExtendedRational)> = Vec::new();
            let mut discounts: Vec<(Rational, Rational)> = Vec::new();
            for (p, v, is_break) in raw {
                if is_break {
                    breaks.push((half(p), fin(v)));
                } else {
                    discounts.push((half(p), v));
                }
            }
            let piece = |x: &Rational, strict: bool| {
                breaks
                    .iter()
                    .rev()
                    .find(|(p, _)| if strict { p < x } else { p <= x })
                    .map_or(default.clone(), |(_, v)| v.clone())
            };
            let mut overrides: Vec<(Rational, ExtendedRational)> = discounts
                .into_iter()
                .map(|(p, v)| {
                    let cap = piece(&p, true).min(piece(&p, false));
                    let v = fin(v).min(cap);
                    (p, v)
                })
                .collect();
            for (p, v) in &breaks {
                let left = piece(p, true);
                if *v > left && !overrides.iter().any(|(q, _)| q == p) {
                    overrides.push((p.clone(), left));
                }
            }
            let has_finite = std::iter::once(&default)
                .chain(breaks.iter().map(|b| &b.1))
                .chain(overrides.iter().map(|o| &o.1))
                .any(ExtendedRational::is_finite);
            if !has_finite {
                overrides.push((rat(0, 1), ExtendedRational::zero()));
            }
            make_fee(default, breaks, overrides).expect("generated fee is valid")
        })
}

pub fn profile(max: usize) -> impl Strategy<Value = AgentProfile> {
    prop::collection::vec(position(), 1..=max).prop_map(|xs| make_profile(&xs).expect("non-empty"))
}
