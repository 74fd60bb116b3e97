//! Front-end errors and the exit-status contract.

use sectorial_core::Error;

/// `0` success, `2` parse, `3` capability, `4` precondition, `5` numerical non-convergence.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    /// Input file missing or unreadable; reported with the parse status.
    #[error("cannot read input: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("self-test failed: {0}")]
    SelfTest(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Input(_) => 2,
            CliError::Precondition(_) | CliError::Output(_) => 4,
            CliError::SelfTest(_) => 5,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

pub fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::Capability(_) | Error::MissingSpectralData => 3,
        Error::NonConvergence { .. }
        | Error::Decay(_)
        | Error::FitFailure(_)
        | Error::TruncationOverflow { .. }
        | Error::ExtrapolationUnstable { .. }
        | Error::Cancellation { .. } => 5,
        Error::PoleProximity { .. }
        | Error::Domain(_)
        | Error::InvalidOrder(_)
        | Error::SingularResolvent(_)
        | Error::BranchCut(_)
        | Error::ContourAngle { .. }
        | Error::DimensionMismatch { .. }
        | Error::Precondition(_) => 4,
    }
}
