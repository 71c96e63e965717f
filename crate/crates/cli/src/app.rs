use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use feeloc::audit::{
    audit_lower_bound, check_group_sp, check_sp, eval_suite, gen_instance, mean_mechanism, random_suite,
    BoundFormula, DeviationGrid, Family, RandomParams,
};
use feeloc::game::expected_objective;
use feeloc::number::parse_rational;
use feeloc::solver::solve_multi;
use feeloc::{Lottery, Mechanism, MechanismOutcome, Objective};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::instance::InstanceFile;
use crate::report::{OutcomeBody, OutcomeJson, ReportFile, SampleJson, SolutionJson, SpReport};
use crate::tables::{self, SuiteSpec, Table};

#[derive(Debug, Parser)]
#[command(name = "feeloc", version, about = "Facility location games with entrance fees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal placement for an instance file.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Facilities to open; defaults to the file's `m`.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
    },
    /// Run a mechanism on an instance file.
    Mech {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long)]
        instance: PathBuf,
        /// Draw this many placements from a randomized outcome.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for profitable misreports on the default deviation grid.
    AuditSp {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long)]
        instance: PathBuf,
        /// Largest coalition to try.
        #[arg(long, default_value_t = 1)]
        group: usize,
    },
    /// Approximation ratios over a random suite or a family.
    Eval {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long, value_enum)]
        suite: SuiteKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_agents: usize,
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value = "")]
        params: String,
        /// Lower-bound tolerance; defaults to the family's slack.
        #[arg(long)]
        tolerance: Option<String>,
    },
    /// Emit instance files for a family.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "")]
        params: String,
        /// Directory for one file per profile; prints a JSON array otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a bound table as CSV.
    Reproduce {
        #[arg(long, value_enum)]
        table: Table,
        /// Append a random-suite summary row for this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200, requires = "seed")]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Tc,
    Mc,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Tc => Objective::Tc,
            ObjectiveArg::Mc => Objective::Mc,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteKind {
    Random,
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MechName {
    Mi,
    Med,
    Mij,
    Trm,
    /// Optimal solver for the instance objective (not strategyproof).
    Opt,
    /// Mean of the reports (not strategyproof).
    Mean,
}

#[derive(Debug, Clone, Args)]
pub struct MechArgs {
    #[arg(long, value_enum)]
    pub name: MechName,
    /// 1-based sorted agent index for `mi` and `mij`.
    #[arg(long)]
    pub i: Option<usize>,
    /// Second index for `mij`; `n` when omitted.
    #[arg(long)]
    pub j: Option<usize>,
}

impl MechArgs {
    pub fn build(&self, objective: Objective, m: usize) -> CliResult<Mechanism> {
        let usage = |msg: &str| Err(CliError::Usage(msg.to_string()));
        if self.i.is_some() && !matches!(self.name, MechName::Mi | MechName::Mij) {
            return usage("--i only applies to mi and mij");
        }
        if self.j.is_some() && self.name != MechName::Mij {
            return usage("--j only applies to mij");
        }
        Ok(match self.name {
            MechName::Mi => match self.i {
                Some(0) => return usage("--i is 1-based"),
                Some(i) => Mechanism::OptOfAgent(i),
                None => return usage("mi needs --i"),
            },
            MechName::Med => Mechanism::OptOfMedian,
            MechName::Mij => {
                let i = self.i.unwrap_or(1);
                if i == 0 || self.j == Some(0) {
                    return usage("--i and --j are 1-based");
                }
                Mechanism::OptPair(i, self.j.unwrap_or(usize::MAX))
            }
            MechName::Trm => Mechanism::TwoPointRandomization,
            MechName::Opt => Mechanism::OptimalSolver { objective, m },
            MechName::Mean => mean_mechanism(),
        })
    }

    fn default_objective(&self) -> Objective {
        match self.name {
            MechName::Mi => Objective::Mc,
            _ => Objective::Tc,
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: &mut dyn Write) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    writeln!(out, "{text}").map_err(|e| CliError::io("<stdout>", e))
}

fn sample(lottery: &Lottery, draws: usize, seed: u64) -> CliResult<SampleJson> {
    let denom = lottery
        .support()
        .iter()
        .fold(BigInt::from(1), |acc, (_, p)| num_integer::Integer::lcm(&acc, p.denom()));
    let too_fine = || CliError::Usage("lottery probabilities are too fine to sample".into());
    let d = denom.to_u64().ok_or_else(too_fine)?;
    let weights = lottery
        .support()
        .iter()
        .map(|(_, p)| (p.numer() * (&denom / p.denom())).to_u64().ok_or_else(too_fine))
        .collect::<CliResult<Vec<u64>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0; weights.len()];
    for _ in 0..draws {
        let mut u = rng.random_range(0..d);
        for (k, w) in weights.iter().enumerate() {
            if u < *w {
                counts[k] += 1;
                break;
            }
            u -= w;
        }
    }
    Ok(SampleJson { seed, draws, counts })
}

fn instance_id(file: &InstanceFile, path: &Path) -> String {
    file.id.clone().unwrap_or_else(|| path.display().to_string())
}

fn run_mech(
    args: &MechArgs,
    path: &Path,
    draws: Option<usize>,
    seed: u64,
    out: &mut dyn Write,
) -> CliResult<()> {
    let file = InstanceFile::read(path)?;
    let (fee, profile) = (file.fee()?, file.profile()?);
    let mech = args.build(file.objective(), file.m)?;
    let outcome = mech.apply(&fee, &profile)?;
    let sample = match (draws, &outcome) {
        (None, _) => None,
        (Some(n), MechanismOutcome::Randomized(lot)) => Some(sample(lot, n, seed)?),
        (Some(n), MechanismOutcome::Deterministic(p)) => Some(sample(&Lottery::certain(p.clone()), n, seed)?),
    };
    let lottery = match &outcome {
        MechanismOutcome::Randomized(l) => l.clone(),
        MechanismOutcome::Deterministic(p) => Lottery::certain(p.clone()),
    };
    let json = OutcomeJson {
        mechanism: mech.label(),
        body: OutcomeBody::new(&outcome),
        expected_tc: (&expected_objective(&fee, &profile, &lottery, Objective::Tc)?).into(),
        expected_mc: (&expected_objective(&fee, &profile, &lottery, Objective::Mc)?).into(),
        sample,
    };
    emit_json(&json, out)
}

fn parse_family(s: &str) -> CliResult<Family> {
    s.parse::<Family>().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Solve { instance, m, objective } => {
            let file = InstanceFile::read(&instance)?;
            let objective = objective.map(Objective::from).unwrap_or(file.objective());
            let m = m.unwrap_or(file.m);
            if m == 0 {
                return Err(CliError::Usage("--m must be at least 1".into()));
            }
            let sol = solve_multi(&file.fee()?, &file.profile()?, m, objective)?;
            emit_json(&SolutionJson::new(objective, m, &sol), out)
        }
        Command::Mech { mech, instance, sample, seed } => run_mech(&mech, &instance, sample, seed, out),
        Command::AuditSp { mech: args, instance, group } => {
            if group == 0 {
                return Err(CliError::Usage("--group must be at least 1".into()));
            }
            let file = InstanceFile::read(&instance)?;
            let (fee, profile) = (file.fee()?, file.profile()?);
            let mech = args.build(file.objective(), file.m)?;
            let grid = DeviationGrid::default_for(&fee, &profile);
            let found = if group == 1 {
                check_sp(&mech, &fee, &profile, &grid)?
            } else {
                check_group_sp(&mech, &fee, &profile, &grid, group)?
            };
            let report = SpReport {
                mechanism: mech.label(),
                instance_id: Some(instance_id(&file, &instance)),
                max_coalition: group,
                grid_points: grid.points().len(),
                strategyproof: found.is_empty(),
                violations: found.iter().map(Into::into).collect(),
            };
            emit_json(&report, out)
        }
        Command::Eval {
            mech: args,
            suite,
            seed,
            count,
            max_agents,
            objective,
            family,
            params,
            tolerance,
        } => {
            let report = match suite {
                SuiteKind::Random => {
                    if family.is_some() {
                        return Err(CliError::Usage("--family needs --suite family".into()));
                    }
                    let objective = objective.map(Objective::from).unwrap_or(args.default_objective());
                    let rp = RandomParams { max_agents, ..RandomParams::default() };
                    let instances = random_suite(seed, count, &rp)?;
                    let mech = args.build(objective, 1)?;
                    let bound = BoundFormula::for_mechanism(&mech, objective);
                    eval_suite(&mech, &instances, objective, bound)?
                }
                SuiteKind::Family => {
                    let id = family.ok_or_else(|| CliError::Usage("--suite family needs --family".into()))?;
                    let fi = gen_instance(parse_family(&id)?, &params)?;
                    if objective.is_some_and(|o| Objective::from(o) != fi.family.objective()) {
                        return Err(CliError::Usage(format!(
                            "{} is scored by {}",
                            fi.family,
                            fi.family.objective().as_str()
                        )));
                    }
                    let tolerance = tolerance.as_deref().map(parse_rational).transpose()?;
                    let mech = args.build(fi.family.objective(), fi.family.arity())?;
                    audit_lower_bound(&mech, &fi, tolerance)?
                }
            };
            emit_json(&ReportFile::from(&report), out)
        }
        Command::Gen { family, params, out: dir } => {
            let fi = gen_instance(parse_family(&family)?, &params)?;
            let files: Vec<InstanceFile> = fi
                .instances()
                .iter()
                .map(|inst| {
                    InstanceFile::from_parts(
                        Some(inst.id.clone()),
                        &inst.fee,
                        &inst.profile,
                        inst.m,
                        fi.family.objective(),
                    )
                })
                .collect();
            match dir {
                None => emit_json(&files, out),
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
                    let mut written = Vec::new();
                    for (file, label) in files.iter().zip(&fi.labels) {
                        let path = dir.join(format!("{}_{label}.json", fi.family));
                        std::fs::write(&path, file.to_json() + "\n")
                            .map_err(|e| CliError::io(path.display().to_string(), e))?;
                        written.push(path.display().to_string());
                    }
                    emit_json(&written, out)
                }
            }
        }
        Command::Reproduce { table, seed, count, out: path } => {
            let rows = tables::rows(table, seed.map(|seed| SuiteSpec { seed, count }))?;
            match path {
                None => tables::write_csv(&rows, out),
                Some(p) => {
                    let f =
                        std::fs::File::create(&p).map_err(|e| CliError::io(p.display().to_string(), e))?;
                    tables::write_csv(&rows, f)
                }
            }
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FEELOC_THREADS") else { return Ok(()) };
    let threads: usize = match raw.trim().parse() {
        Ok(t) if t >= 1 => t,
        _ => return Err(CliError::Usage(format!("FEELOC_THREADS must be an integer >= 1, got {raw:?}"))),
    };
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Runs one command and returns the process exit code. Errors go to `err`
/// as a single JSON line, except clap's own usage messages.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match configure_threads().and_then(|()| execute(cli, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}
