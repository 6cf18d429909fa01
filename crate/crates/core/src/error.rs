use thiserror::Error;

/// Errors raised while loading scenarios, solving thresholds or running
/// campaigns.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("pair index {index} out of range for {pairs} pairs")]
    PairIndex { index: usize, pairs: usize },

    #[error("pair {pair}: {link} distance is zero")]
    DegenerateGeometry { pair: usize, link: &'static str },

    #[error("contention can never succeed (success probability is zero)")]
    NoContentionSuccess,

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds target {target:e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("step size {step} outside the admissible band [{low}, {high}]")]
    StepSize { step: f64, low: f64, high: f64 },

    #[error("fixed-point iteration stalled after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("root bracket failed: {0}")]
    Bracket(String),

    #[error("pair {pair} is not in the probing set; its thresholds are undefined")]
    NotProbing { pair: usize },

    #[error("threshold table: {0}")]
    Table(String),

    #[error("round exceeded {0} contentions without stopping")]
    Stalled(u64),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI: 2 for configuration and usage
    /// problems, 3 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Quadrature { .. } | Error::NoConvergence { .. } | Error::Bracket(_) | Error::Stalled(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
