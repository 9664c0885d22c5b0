use std::fmt;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum BulsError {
    /// An argument lies outside the domain of the function.
    Domain(String),
    /// A parameter vector or generator shape violates its constraints.
    InvalidParameter(String),
    /// Invalid observation, with the zero-based row index when known.
    Data { row: Option<usize>, msg: String },
    /// An iterative or adaptive routine did not reach its tolerance.
    Convergence { what: &'static str, achieved: f64 },
    /// A moment or integral does not exist.
    Divergence(String),
    /// The conditioning event has (numerically) zero probability.
    NegligibleMass,
    /// Log-likelihood evaluated to a non-finite value at a row.
    NonFinite { row: usize },
    /// Too many replications of a study failed.
    StudyAborted { failed: usize, total: usize },
}

impl fmt::Display for BulsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BulsError::Domain(msg) => write!(f, "domain error: {msg}"),
            BulsError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            BulsError::Data { row: Some(r), msg } => write!(f, "data error at row {}: {msg}", r + 1),
            BulsError::Data { row: None, msg } => write!(f, "data error: {msg}"),
            BulsError::Convergence { what, achieved } => {
                write!(f, "{what} did not converge (achieved error {achieved:e})")
            }
            BulsError::Divergence(msg) => write!(f, "divergent: {msg}"),
            BulsError::NegligibleMass => write!(f, "conditioning event has negligible mass"),
            BulsError::NonFinite { row } => {
                write!(f, "log-likelihood is not finite at row {}", row + 1)
            }
            BulsError::StudyAborted { failed, total } => {
                write!(f, "study aborted: {failed} of {total} fits failed")
            }
        }
    }
}

impl std::error::Error for BulsError {}

pub type Result<T> = std::result::Result<T, BulsError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(BulsError::Domain(msg.into()))
}
