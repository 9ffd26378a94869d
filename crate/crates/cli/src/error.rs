use std::fmt;

/// Failure of a command, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration. Exit 2.
    Usage(String),
    /// The simulation or its output failed. Exit 3.
    Simulation(String),
    /// Some sweep rows failed; the rest were written. Exit 4.
    Partial { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Partial { .. } => 4,
        }
    }

    pub(crate) fn usage(e: impl fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub(crate) fn sim(e: impl fmt::Display) -> Self {
        CliError::Simulation(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Simulation(m) => write!(f, "simulation failed: {m}"),
            CliError::Partial { failed, total } => write!(f, "{failed} of {total} sweep rows failed"),
        }
    }
}

impl std::error::Error for CliError {}
