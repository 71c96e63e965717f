//! The bound tables emitted by `reproduce`.

use std::io::Write;

use feeloc::audit::{
    approx_ratio, eval_suite, gen_instance, random_suite, BoundFormula, Family, RandomParams,
};
use feeloc::{int, make_profile, AgentProfile, EntranceFee, ExtendedRational, Mechanism, Objective};
use serde::Serialize;

use crate::error::CliResult;
use crate::report::DECIMAL_PLACES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Table {
    TcBounds,
    McBounds,
    TwoFacility,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub family: String,
    pub params: String,
    pub r_e: String,
    pub mechanism: String,
    pub objective: String,
    pub ratio_exact: String,
    pub ratio_decimal: String,
    pub bound_exact: String,
    pub within_bound: bool,
}

/// Optional random-suite summary appended to a table.
#[derive(Debug, Clone, Copy)]
pub struct SuiteSpec {
    pub seed: u64,
    pub count: usize,
}

fn row(
    family: &str,
    params: String,
    fee: &EntranceFee,
    profile: &AgentProfile,
    mech: &Mechanism,
    objective: Objective,
) -> CliResult<Row> {
    let r_e = fee.extrema().r_e;
    let ratio = approx_ratio(mech, fee, profile, objective)?;
    let bound = BoundFormula::for_mechanism(mech, objective)
        .map(|b| b.eval(&r_e, profile.len()))
        .unwrap_or(ExtendedRational::Infinity);
    Ok(Row {
        family: family.to_string(),
        params,
        r_e: r_e.to_string(),
        mechanism: mech.label(),
        objective: objective.as_str().to_string(),
        ratio_exact: ratio.to_string(),
        ratio_decimal: ratio.to_decimal(DECIMAL_PLACES),
        within_bound: ratio <= bound,
        bound_exact: bound.to_string(),
    })
}

/// One row per profile of the family member.
fn family_rows(family: Family, params: &str, mech: &Mechanism) -> CliResult<Vec<Row>> {
    let fi = gen_instance(family, params)?;
    let base = fi.params_string();
    fi.profiles
        .iter()
        .zip(&fi.labels)
        .map(|(p, label)| {
            let params = format!("{base},profile={label}");
            row(family.id(), params, &fi.fee, p, mech, family.objective())
        })
        .collect()
}

/// Constant fee `c` on the profile `(0, 1)`.
fn classical_row(c: &str) -> CliResult<Row> {
    let fee = EntranceFee::constant(c.parse()?)?;
    let profile = make_profile(&[int(0), int(1)])?;
    row("CLASSICAL", format!("c={c},profile=0;1"), &fee, &profile, &Mechanism::OptOfAgent(1), Objective::Mc)
}

fn suite_row(mech: &Mechanism, objective: Objective, spec: SuiteSpec) -> CliResult<Row> {
    let params = RandomParams::default();
    let suite = random_suite(spec.seed, spec.count, &params)?;
    let bound = BoundFormula::for_mechanism(mech, objective);
    let report = eval_suite(mech, &suite, objective, bound)?;
    let worst = report.entries.iter().max_by(|a, b| a.ratio.cmp(&b.ratio)).expect("non-empty suite");
    Ok(Row {
        family: "RANDOM".to_string(),
        params: format!("seed={},count={},worst={}", spec.seed, spec.count, worst.instance_id),
        r_e: worst.r_e.to_string(),
        mechanism: mech.label(),
        objective: objective.as_str().to_string(),
        ratio_exact: report.worst_ratio.to_string(),
        ratio_decimal: report.worst_ratio.to_decimal(DECIMAL_PLACES),
        bound_exact: worst.bound.as_ref().map(ToString::to_string).unwrap_or_default(),
        within_bound: report.within_bound,
    })
}

pub fn rows(table: Table, suite: Option<SuiteSpec>) -> CliResult<Vec<Row>> {
    let med = Mechanism::OptOfMedian;
    let trm = Mechanism::TwoPointRandomization;
    let m1 = Mechanism::OptOfAgent(1);
    let m1n = Mechanism::first_last();
    let mut out = Vec::new();
    match table {
        Table::TcBounds => {
            out.extend(family_rows(Family::TcTightMed, "L=301/100", &med)?);
            out.extend(family_rows(Family::TcTightMed, "L=4", &med)?);
            out.extend(family_rows(Family::TcTightMed, "L=4", &trm)?);
            out.extend(family_rows(Family::TcLbDet, "d=1,eps=1/100", &med)?);
            out.extend(family_rows(Family::TcLbRand, "eps=1/100", &trm)?);
            if let Some(spec) = suite {
                out.push(suite_row(&med, Objective::Tc, spec)?);
                out.push(suite_row(&trm, Objective::Tc, spec)?);
            }
        }
        Table::McBounds => {
            out.extend(family_rows(Family::McTightM1, "", &m1)?);
            out.extend(family_rows(Family::McLb2, "", &m1)?);
            out.extend(family_rows(Family::McLb3, "d=1,eps=1/100", &m1)?);
            out.extend(family_rows(Family::McLbRand, "eps=1/100", &m1)?);
            for c in ["0", "1/18", "1/198"] {
                out.push(classical_row(c)?);
            }
            if let Some(spec) = suite {
                out.push(suite_row(&m1, Objective::Mc, spec)?);
            }
        }
        Table::TwoFacility => {
            for params in ["n=5,L=10000", "n=5,L=1000000", "n=7,L=10000", "n=3,L=100"] {
                out.extend(family_rows(Family::TwoFacTc, params, &m1n)?);
            }
            out.extend(family_rows(Family::TwoFacLb, "", &m1n)?);
            if let Some(spec) = suite {
                out.push(suite_row(&m1n, Objective::Tc, spec)?);
            }
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| crate::error::CliError::io("<output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use feeloc::number::format_rational;
    use feeloc::rat;

    fn find<'a>(rows: &'a [Row], family: &str, params: &str, mech: &str) -> &'a Row {
        rows.iter()
            .find(|r| r.family == family && r.params.starts_with(params) && r.mechanism == mech)
            .unwrap_or_else(|| panic!("no row {family} {params} {mech}"))
    }

    #[test]
    fn tc_table_values() {
        let rows = rows(Table::TcBounds, None).unwrap();
        let tight = find(&rows, "TC_TIGHT_MED", "e_min=1,e_max=4,L=301/100", "m_med");
        assert_eq!(tight.ratio_exact, format_rational(&rat(1101, 501)));
        assert_eq!(tight.bound_exact, "11/5");
        assert_eq!(tight.r_e, "4");
        assert!(tight.within_bound);
        assert_eq!(find(&rows, "TC_TIGHT_MED", "e_min=1,e_max=4,L=4", "m_med").ratio_exact, "2");
        let t = find(&rows, "TC_TIGHT_MED", "e_min=1,e_max=4,L=4", "trm");
        assert_eq!((t.ratio_exact.as_str(), t.bound_exact.as_str()), ("3/2", "8/5"));
        assert!(rows.iter().all(|r| r.within_bound));
    }

    #[test]
    fn mc_table_values() {
        let rows = rows(Table::McBounds, None).unwrap();
        let t = find(&rows, "MC_TIGHT_M1", "", "m_1");
        assert_eq!((t.ratio_exact.as_str(), t.bound_exact.as_str()), ("12/5", "12/5"));
        assert_eq!(find(&rows, "CLASSICAL", "c=0,", "m_1").ratio_exact, "2");
        assert_eq!(find(&rows, "CLASSICAL", "c=1/18,", "m_1").ratio_exact, "19/10");
        assert_eq!(find(&rows, "CLASSICAL", "c=1/198,", "m_1").ratio_exact, "199/100");
    }

    #[test]
    fn two_facility_values() {
        let rows = rows(Table::TwoFacility, None).unwrap();
        let r = find(&rows, "TWO_FAC_TC", "n=5,e_min=1,e_max=2,L=10000,", "m_1n");
        assert_eq!(r.ratio_exact, format_rational(&rat(15010, 5006)));
        assert_eq!(r.bound_exact, "3");
        let three = find(&rows, "TWO_FAC_TC", "n=3,", "m_1n");
        assert!(!three.within_bound);
    }
}
