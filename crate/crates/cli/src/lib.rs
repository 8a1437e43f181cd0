//! Command-line front end of `fracalign`: scenario files, runs, sweeps and
//! modulus-of-continuity verification.

pub mod config;
pub mod error;
pub mod output;
pub mod profile;
pub mod scenario;
pub mod selftest;
pub mod sweep;

pub use config::{emit_config, parse_config, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use scenario::{run_scenario, Outcome};

/// Process exit codes.
pub mod exit {
    use crate::error::CliError;

    pub const OK: i32 = 0;
    pub const BLOWUP: i32 = 2;
    /// A check failed, or a blow-up was expected and did not happen.
    pub const CHECK_FAILED: i32 = 3;
    /// Vacuum, non-finite values or the step limit.
    pub const RUN_FAILED: i32 = 4;
    pub const IO: i32 = 5;
    /// Invalid configuration or command line.
    pub const USAGE: i32 = 64;

    pub fn for_error(e: &CliError) -> i32 {
        match e {
            CliError::Config(_) | CliError::Grid(_) => USAGE,
            CliError::Io { .. } | CliError::Csv { .. } => IO,
            CliError::Core(_) => RUN_FAILED,
        }
    }
}
