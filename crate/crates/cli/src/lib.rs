//! Command-line front end for `feeloc`: JSON instance files, solver and
//! mechanism runs, audits, and the CSV bound tables.

pub mod app;
pub mod error;
pub mod instance;
pub mod report;
pub mod tables;

pub use app::run;
pub use error::{CliError, CliResult};
pub use instance::InstanceFile;
