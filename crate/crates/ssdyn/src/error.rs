use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown algorithm `{0}`")]
    UnknownTable(String),
    #[error("{name}: parameter {param} = {value} outside [{lo}, {hi}]")]
    ParameterRange {
        name: String,
        param: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{0}: table cannot be constructed ({1})")]
    Construction(String, String),
    #[error("singular matrix: {0}")]
    Singular(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("nonlinear iteration did not converge after {iterations} iterations (last |da| = {last:.3e})")]
    NotConverged { iterations: usize, last: f64 },
    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("solution diverged at step {step} (|x| = {magnitude:.3e})")]
    Diverged { step: usize, magnitude: f64 },
    #[error("{0} requires alpha2 = 0")]
    NotExplicit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("force evaluation failed: {0}")]
    Force(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
