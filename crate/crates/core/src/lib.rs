//! Facility location games on the real line where every facility charges a
//! location-dependent entrance fee.
//!
//! An agent at `x` served by a facility at `ℓ` pays `|x - ℓ| + e(ℓ)`. The crate
//! provides exact (rational) implementations of
//!
//! * the fee model and its interval-minimization oracle ([`fee`]),
//! * agent costs, objectives and per-agent optimal locations ([`game`]),
//! * optimal one- and multi-facility solvers plus a brute-force oracle ([`solver`]),
//! * the strategyproof mechanisms `m_i`, `m_med`, `m_{i,j}` and the two-point
//!   randomization mechanism ([`mechanism`]),
//! * strategyproofness checks, approximation ratios, instance families and
//!   lower-bound audits ([`audit`]).

pub mod audit;
pub mod fee;
pub mod game;
pub mod mechanism;
pub mod number;
pub mod solver;

pub use fee::{make_fee, EntranceFee, FeeExtrema, ValidationKind};
pub use game::{
    agent_cost, dominates, make_profile, optimal_location, AgentChoice, AgentProfile, Lottery, Objective,
    OptimalLocation, Placement,
};
pub use mechanism::{Mechanism, MechanismOutcome};
pub use number::{int, rat, ExtendedRational, Rational};
pub use solver::Solution;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid fee function: {0}")]
    Validation(ValidationKind),
    #[error("empty interval: lo > hi")]
    EmptyInterval,
    #[error("agent profile is empty")]
    EmptyProfile,
    #[error("placement needs at least one facility")]
    EmptyPlacement,
    #[error("invalid lottery: {0}")]
    InvalidLottery(String),
    #[error("no facility location with a finite entrance fee is available")]
    Infeasible,
    #[error("bad agent range [{0}, {1}] for a profile of {2} agents")]
    BadRange(usize, usize, usize),
    #[error("bad agent index {0} for a profile of {1} agents")]
    BadIndex(usize, usize),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("cannot parse number {0:?}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
