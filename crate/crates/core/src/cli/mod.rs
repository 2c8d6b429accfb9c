//! Scenario runner behind the `fockbell` binary.
//!
//! Every study is reachable as one invocation:
//!
//! ```text
//! fockbell dist --n-alpha 2 --n-beta 2 --zeta 0.3 --theta -0.1
//! fockbell compare --n-alpha 3 --n-beta 3 --scan-zeta 0:pi:8 --m-measured 4
//! fockbell bchsh --n 2,4,1000000
//! fockbell ghz --n 9 --angles 0,0,0 --expect-violation
//! fockbell hardy --n 6 --format tree
//! ```
//!
//! Flags may also come from a TOML file (`--config run.toml`) whose keys
//! mirror the flag names; flags given on the command line win.

mod config;
mod run;

pub use config::{
    parse_angle, parse_config, Args, ConfigLayer, Format, ScanAxis, ScanRange, Scenario,
    ScenarioConfig, DEFAULT_MAX_OUTCOMES,
};
pub use run::{run, write_record, PointRecord, ResultRecord, Table};

use crate::error::Error;

/// Failures of a command-line run, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Validation(#[from] Error),
    #[error("expectation mismatch: {0}")]
    Expectation(String),
    /// Help or version text; not a failure.
    #[error("{0}")]
    Info(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(Error::Config(_)) => 2,
            CliError::Validation(_) => 3,
            CliError::Expectation(_) => 4,
            CliError::Info(_) => 0,
        }
    }
}

/// Parse, run, write the output and check `--expect-violation`.
pub fn main_with_args<I, S>(args: I) -> Result<ResultRecord, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let config = parse_config(args)?;
    let record = run(&config)?;
    write_record(&record, &config)?;
    if let Some(expected) = config.expect_violation {
        match record.verdict {
            Some(v) if v == expected => {}
            Some(v) => {
                return Err(CliError::Expectation(format!(
                    "expected violation = {expected}, found {v}"
                )))
            }
            None => {
                return Err(CliError::Usage(format!(
                    "scenario {} has no violation verdict",
                    config.scenario.name()
                )))
            }
        }
    }
    Ok(record)
}
