mod common;

use common::{fee, fin, position, profile};
use feeloc::audit::{
    approx_ratio, check_group_sp, check_sp, gen_instance, mean_mechanism, DeviationGrid, Family,
};
use feeloc::game::{expected_agent_cost, location_cost};
use feeloc::mechanism::{critical_position, mech_med, mech_trm, trm_trace};
use feeloc::{
    int, make_fee, make_profile, rat, EntranceFee, ExtendedRational, Mechanism, Objective, Rational,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn order_statistic_mechanisms_are_group_sp(fee in fee(), p in profile(3)) {
        let grid = DeviationGrid::default_for(&fee, &p);
        for mech in [Mechanism::OptOfAgent(1), Mechanism::OptOfMedian, Mechanism::first_last()] {
            let v = check_group_sp(&mech, &fee, &p, &grid, 2).unwrap();
            prop_assert!(v.is_empty(), "{} manipulable: {:?}", mech.label(), v[0]);
        }
        let last = Mechanism::OptOfAgent(p.len());
        prop_assert!(check_sp(&last, &fee, &p, &grid).unwrap().is_empty());
    }

    #[test]
    fn median_ignores_non_crossing_misreports(fee in fee(), p in profile(7), shift in 1i64..=8) {
        let n = p.len();
        let med = n.div_ceil(2);
        let before = mech_med(&fee, &p).unwrap();
        let xs = p.positions();
        // Push the lowest agent further left and the highest further right.
        if med > 1 {
            let q = p.with_reports(&[(p.perm()[0], &xs[0] - int(shift))]);
            prop_assert_eq!(&mech_med(&fee, &q).unwrap(), &before);
        }
        if med < n {
            let q = p.with_reports(&[(p.perm()[n - 1], &xs[n - 1] + int(shift))]);
            prop_assert_eq!(&mech_med(&fee, &q).unwrap(), &before);
        }
    }

    #[test]
    fn trm_lottery_is_well_formed(fee in fee(), p in profile(8)) {
        let t = trm_trace(&fee, &p).unwrap();
        prop_assert!(t.k <= t.n);
        let lot = mech_trm(&fee, &p).unwrap();
        let total: Rational = lot.support().iter().map(|(_, q)| q.clone()).sum();
        prop_assert_eq!(total, int(1));
        prop_assert!(lot.support().len() <= 2);
    }

    #[test]
    fn critical_position_is_indifferent_or_clamped(fee in fee(), a in position(), b in position()) {
        let (ea, eb) = (fee.eval(&a), fee.eval(&b));
        prop_assume!(ea.is_finite() && eb.is_finite());
        let c = critical_position(&fee, &a, &b).unwrap();
        let (lo, hi) = if a <= b { (&a, &b) } else { (&b, &a) };
        prop_assert!(*lo <= c && c <= *hi);
        let (ca, cb) = (location_cost(&fee, &c, &a), location_cost(&fee, &c, &b));
        if c != *lo && c != *hi {
            prop_assert_eq!(ca, cb);
        }
    }

    #[test]
    fn constant_fee_recovers_classical(c in 0i64..=5, p in profile(8)) {
        let fee = EntranceFee::constant(fin(int(c))).unwrap();
        let med = p.sorted(p.len().div_ceil(2)).unwrap().clone();
        let out = mech_med(&fee, &p).unwrap();
        prop_assert_eq!(out.locations(), &[med]);
        let out = Mechanism::first_last().apply(&fee, &p).unwrap().locations();
        prop_assert_eq!(out, vec![p.sorted(1).unwrap().clone(), p.sorted(p.len()).unwrap().clone()]);
    }

    #[test]
    fn ratios_are_at_least_one(fee in fee(), p in profile(5)) {
        for (mech, obj) in [
            (Mechanism::OptOfMedian, Objective::Tc),
            (Mechanism::TwoPointRandomization, Objective::Tc),
            (Mechanism::OptOfAgent(1), Objective::Mc),
            (Mechanism::first_last(), Objective::Mc),
            (Mechanism::first_last(), Objective::Tc),
        ] {
            let r = approx_ratio(&mech, &fee, &p, obj).unwrap();
            prop_assert!(r >= ExtendedRational::one(), "{} {}: {}", mech.label(), obj.as_str(), r);
        }
    }
}

#[test]
fn mean_control_is_manipulable() {
    let zero = EntranceFee::constant(ExtendedRational::zero()).unwrap();
    let p = make_profile(&[int(0), int(1), int(4)]).unwrap();
    let grid = DeviationGrid::default_for(&zero, &p);
    assert!(!check_sp(&mean_mechanism(), &zero, &p, &grid).unwrap().is_empty());
}

/// The randomized mechanism can be manipulated by its own median agent:
/// reporting 2 collapses both lottery points onto 2.
#[test]
fn trm_counterexample_median_agent() {
    let fee = make_fee(
        fin(int(10)),
        vec![(int(-10), fin(rat(5, 2))), (int(3), fin(int(8)))],
        vec![(int(3), fin(rat(5, 2))), (int(6), fin(int(8))), (int(10), fin(int(0)))],
    )
    .unwrap();
    let truth = make_profile(&[rat(-5, 2), rat(7, 2), rat(19, 2)]).unwrap();
    let t = trm_trace(&fee, &truth).unwrap();
    assert_eq!((t.median_location.clone(), t.tc_location.clone(), t.k), (int(3), int(10), 1));
    let honest = mech_trm(&fee, &truth).unwrap();
    // 1/3 * (13/2) + 2/3 * 3
    assert_eq!(expected_agent_cost(&fee, &rat(7, 2), &honest), fin(rat(25, 6)));

    let lie = truth.with_reports(&[(1, int(2))]);
    let t = trm_trace(&fee, &lie).unwrap();
    assert_eq!((t.median_location, t.tc_location), (int(2), int(2)));
    let gamed = mech_trm(&fee, &lie).unwrap();
    assert_eq!(expected_agent_cost(&fee, &rat(7, 2), &gamed), fin(int(4)));

    let grid = DeviationGrid::from_points(vec![int(2)]);
    let v = check_sp(&Mechanism::TwoPointRandomization, &fee, &truth, &grid).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].coalition, vec![1]);
}

/// A non-median agent drags the total-cost optimum toward itself.
#[test]
fn trm_counterexample_overstatement() {
    let fee = make_fee(
        fin(rat(15, 2)),
        vec![(int(8), fin(int(0))), (rat(19, 2), fin(rat(7, 2)))],
        vec![(rat(19, 2), fin(int(0)))],
    )
    .unwrap();
    let truth = make_profile(&[int(-10), int(-10), rat(5, 2)]).unwrap();
    let honest = mech_trm(&fee, &truth).unwrap();
    assert_eq!(expected_agent_cost(&fee, &rat(5, 2), &honest), fin(int(20)));
    let lie = truth.with_reports(&[(2, int(7))]);
    let gamed = mech_trm(&fee, &lie).unwrap();
    assert_eq!(expected_agent_cost(&fee, &rat(5, 2), &gamed), fin(rat(91, 6)));
}

/// `m_{1,n}` exceeds `n - 2` when `n = 3`.
#[test]
fn two_facility_bound_fails_for_three_agents() {
    let fi = gen_instance(Family::TwoFacTc, "n=3,e_min=1,e_max=2,L=100").unwrap();
    let r = approx_ratio(&Mechanism::first_last(), &fi.fee, &fi.profiles[0], Objective::Tc).unwrap();
    // (L/2 + 3 e_max) / (L/2 + 2 e_min + e_max) = 56/54
    assert_eq!(r, fin(rat(28, 27)));
    assert!(r > ExtendedRational::one());
}

#[test]
fn two_facility_bound_holds_for_five_agents() {
    for l in ["10", "100", "10000"] {
        let fi = gen_instance(Family::TwoFacTc, &format!("n=5,L={l}")).unwrap();
        let r = approx_ratio(&Mechanism::first_last(), &fi.fee, &fi.profiles[0], Objective::Tc).unwrap();
        assert_eq!(r, fin(fi.threshold.clone()));
        assert!(r <= fin(int(3)));
    }
}
