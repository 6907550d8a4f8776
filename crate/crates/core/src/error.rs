use thiserror::Error;

/// Errors produced by the numerical kernels, the simulators and the pattern tools.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("accuracy failure in {what}: {detail}")]
    Accuracy { what: &'static str, detail: String },

    #[error("no bracketing sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("time went backwards: {previous} -> {requested}")]
    NonMonotoneTime { previous: f64, requested: f64 },

    #[error("solver made no progress at t = {time}: {detail}")]
    NoProgress { time: f64, detail: String },

    #[error("step size underflow at t = {time} (h = {step:e})")]
    StepUnderflow { time: f64, step: f64 },

    #[error("boundary node {node} switched at t = {time}; lattice truncation is invalid")]
    BoundarySwitch { node: i64, time: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("rank {rank} out of range (max {max})")]
    RankOutOfRange { rank: String, max: String },

    #[error("i/o: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
