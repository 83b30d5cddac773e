use thiserror::Error;

/// Errors raised by learners, generators and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what} has l2 norm {norm}, exceeds {limit} (+1e-9 tolerance)")]
    NormViolation {
        what: &'static str,
        norm: f64,
        limit: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("protocol violation: {0}")]
    Protocol(&'static str),

    #[error(
        "cost norm {norm} too large for the combiner: costs are scaled by 1/2 internally and \
         must satisfy ||c|| <= 1 so that sup_(x,y in ball) <c, x - y> <= 1"
    )]
    CostRange { norm: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown {what} `{name}`; valid options: {options}")]
    UnknownName {
        what: &'static str,
        name: String,
        options: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
