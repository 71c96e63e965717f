//! JSON instance files. Every number is a string (`"3"`, `"0.25"`,
//! `"301/100"`), and fees may be `"inf"`.

use std::path::Path;

use feeloc::number::{format_rational, parse_rational};
use feeloc::{make_fee, make_profile, AgentProfile, EntranceFee, ExtendedRational, Objective, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeePoint {
    pub at: String,
    pub fee: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeeSpec {
    pub default: String,
    #[serde(default)]
    pub breakpoints: Vec<FeePoint>,
    #[serde(default)]
    pub overrides: Vec<FeePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveName {
    #[default]
    Tc,
    Mc,
}

impl From<ObjectiveName> for Objective {
    fn from(o: ObjectiveName) -> Self {
        match o {
            ObjectiveName::Tc => Objective::Tc,
            ObjectiveName::Mc => Objective::Mc,
        }
    }
}

impl From<Objective> for ObjectiveName {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Tc => ObjectiveName::Tc,
            Objective::Mc => ObjectiveName::Mc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub fee: FeeSpec,
    pub agents: Vec<String>,
    #[serde(default = "one")]
    pub m: usize,
    #[serde(default)]
    pub objective: ObjectiveName,
}

fn one() -> usize {
    1
}

fn point(at: &Rational, fee: &ExtendedRational) -> FeePoint {
    FeePoint { at: format_rational(at), fee: fee.to_string() }
}

fn parse_fee_value(s: &str) -> CliResult<ExtendedRational> {
    Ok(s.parse::<ExtendedRational>()?)
}

fn parse_points(points: &[FeePoint]) -> CliResult<Vec<(Rational, ExtendedRational)>> {
    points.iter().map(|p| Ok((parse_rational(&p.at)?, parse_fee_value(&p.fee)?))).collect()
}

impl InstanceFile {
    /// Canonical file for an in-memory instance.
    pub fn from_parts(
        id: Option<String>,
        fee: &EntranceFee,
        profile: &AgentProfile,
        m: usize,
        objective: Objective,
    ) -> Self {
        InstanceFile {
            id,
            fee: FeeSpec {
                default: fee.default_fee().to_string(),
                breakpoints: fee.breakpoints().iter().map(|(a, f)| point(a, f)).collect(),
                overrides: fee.overrides().map(|(a, f)| point(a, f)).collect(),
            },
            agents: profile.reported().iter().map(format_rational).collect(),
            m,
            objective: objective.into(),
        }
    }

    pub fn fee(&self) -> CliResult<EntranceFee> {
        Ok(make_fee(
            parse_fee_value(&self.fee.default)?,
            parse_points(&self.fee.breakpoints)?,
            parse_points(&self.fee.overrides)?,
        )?)
    }

    pub fn profile(&self) -> CliResult<AgentProfile> {
        let xs = self.agents.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(make_profile(&xs)?)
    }

    pub fn objective(&self) -> Objective {
        self.objective.into()
    }

    /// Parses and validates; the fee, agents and `m` must all be usable.
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|source| CliError::Json { path: origin.to_string(), source })?;
        file.fee()?;
        file.profile()?;
        if file.m == 0 {
            return Err(feeloc::Error::EmptyPlacement.into());
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(&origin, e))?;
        Self::parse(&text, &origin)
    }

    /// Re-emits the file with every number in canonical form.
    pub fn canonical(&self) -> CliResult<Self> {
        Ok(Self::from_parts(self.id.clone(), &self.fee()?, &self.profile()?, self.m, self.objective()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use feeloc::{int, rat};

    const TIGHT: &str = r#"{
        "fee": { "default": "4", "overrides": [ { "at": "3.01", "fee": "1" } ] },
        "agents": ["0", "3.01"]
    }"#;

    #[test]
    fn parses_decimals_exactly() {
        let f = InstanceFile::parse(TIGHT, "tight").unwrap();
        let fee = f.fee().unwrap();
        assert_eq!(fee.eval(&rat(301, 100)), ExtendedRational::from_int(1));
        assert_eq!(fee.eval(&int(3)), ExtendedRational::from_int(4));
        assert_eq!(f.m, 1);
        assert_eq!(f.objective, ObjectiveName::Tc);
        let c = f.canonical().unwrap();
        assert_eq!(c.agents, vec!["0", "301/100"]);
        assert_eq!(c.fee.overrides[0].at, "301/100");
    }

    #[test]
    fn infinite_fees() {
        let text = r#"{"fee":{"default":"inf","breakpoints":[{"at":"0","fee":"2"},{"at":"5","fee":"inf"}],
                       "overrides":[{"at":"5","fee":"2"}]},
                       "agents":["1"],"m":1,"objective":"mc"}"#;
        let f = InstanceFile::parse(text, "t").unwrap();
        let fee = f.fee().unwrap();
        assert!(fee.eval(&int(-1)).is_infinite());
        assert_eq!(fee.eval(&int(4)), ExtendedRational::from_int(2));
        assert_eq!(f.canonical().unwrap().fee.default, "inf");
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            r#"{"fee":{"default":"x"},"agents":["1"]}"#,
            r#"{"fee":{"default":"1"},"agents":[]}"#,
            r#"{"fee":{"default":"1"},"agents":["1"],"m":0}"#,
            r#"{"fee":{"default":"1"},"agents":["1"],"colour":"red"}"#,
            r#"{"fee":{"default":"-1"},"agents":["1"]}"#,
            r#"{"fee":{"default":"inf"},"agents":["1"]}"#,
            r#"{"fee":{"default":"1","breakpoints":[{"at":"0","fee":"3"}],"overrides":[{"at":"0","fee":"5"}]},"agents":["1"]}"#,
        ];
        for text in bad {
            assert!(InstanceFile::parse(text, "t").is_err(), "{text}");
        }
    }
}
