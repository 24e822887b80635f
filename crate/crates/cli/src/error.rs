use std::fmt;

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Exit code 1.
    Invalid(String),
    /// Exit code 2: no equilibrium, or parameters on an unspecified boundary.
    NoEquilibrium(String),
    /// Exit code 3.
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::NoEquilibrium(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::NoEquilibrium(m) => write!(f, "no equilibrium: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<flipflop::Error> for CliError {
    fn from(e: flipflop::Error) -> Self {
        match e {
            flipflop::Error::BoundaryUnspecified(_) | flipflop::Error::NoBestResponse(_) => {
                CliError::NoEquilibrium(e.to_string())
            }
            flipflop::Error::InvalidInput(m) => CliError::Invalid(m),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
