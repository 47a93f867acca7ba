//! Command-line front-end for discounted-cost LQG design.
//!
//! `disc-lqg <design|verify|simulate> --input problem.json --output report.json`
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid problem, 3 solver failure,
//! 4 malformed problem file.

pub mod problem;
pub mod report;
pub mod run;

use disc_lqg_core::LqgError;

pub use problem::{Problem, ProblemFile, SimBlock};
pub use report::Report;
pub use run::{run_files, run_text, Mode, Outcome, SimOverrides};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("malformed problem file: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("solver failed: {0}")]
    Solver(LqgError),
    #[error("{0}")]
    Io(String),
}

impl From<LqgError> for CliError {
    fn from(e: LqgError) -> Self {
        match e {
            LqgError::DimensionMismatch(m) | LqgError::InvalidInput(m) => CliError::Validation(m),
            other => CliError::Solver(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Parse(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Solver(_) => "solver",
            CliError::Io(_) => "io",
        }
    }
}
