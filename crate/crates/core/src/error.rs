use thiserror::Error;

/// Errors raised by the simulator and the analytic evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("degenerate channel: row {row} is all zeros")]
    DegenerateChannel { row: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("analytics unsupported: {0}")]
    UnsupportedAnalytics(String),

    #[error("integration did not converge after {refinements} refinements (last error estimate {error:e})")]
    NonConvergence { refinements: usize, error: f64 },

    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown scenario {0}")]
    UnknownScenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status for the command-line front end: 3 for requests
    /// the closed forms cannot serve, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnsupportedAnalytics(_) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
