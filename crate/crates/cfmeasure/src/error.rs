use thiserror::Error;

/// Errors raised by the library. Each variant maps to a CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible schedule: {0}")]
    Infeasible(String),
    #[error("schedule too aggressive: rho too small at stage {stage} (interval width {width:.4})")]
    EmptyExceptionalSet { stage: usize, width: f64 },
    #[error("increase J: thinned mass {mass:.6} is below the required {required}")]
    InsufficientJ { mass: f64, required: f64 },
    #[error("floor uncertain at working precision: {0}")]
    FloorUncertain(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("deepen: {0}")]
    Deepen(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) | Error::Serde(_) | Error::Io(_) => 2,
            Error::Infeasible(_) | Error::EmptyExceptionalSet { .. } | Error::InsufficientJ { .. } => 3,
            Error::Verification(_) | Error::Precondition(_) | Error::FloorUncertain(_) => 4,
            Error::Budget(_) | Error::Deepen(_) => 5,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.to_string())
    }
}
