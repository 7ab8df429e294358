use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong inside the library.
///
/// Variants are grouped so a front end can map them onto a small set of exit
/// statuses via [`Error::category`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("edge ({0}, {1}) already exists")]
    DuplicateEdge(usize, usize),
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("edge ({0}, {1}) not found")]
    EdgeNotFound(usize, usize),
    #[error("removing edge ({0}, {1}) would disconnect the graph")]
    ConnectivityViolation(usize, usize),
    #[error("edge ({0}, {1}) is a bridge of the 2-forest cut")]
    Bridge(usize, usize),
    #[error("graph is disconnected (zero eigenvalue has multiplicity > 1)")]
    Disconnected,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what} exceeds capacity guard ({actual} > {limit})")]
    Capacity {
        what: &'static str,
        limit: u128,
        actual: u128,
    },
    #[error("no convergence after {iterations} iterations (relative residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("corrupt index: {0}")]
    CorruptIndex(String),
    #[error("index position {index} outside 1..={size}")]
    OutOfBounds { index: usize, size: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Capacity,
    Convergence,
    CorruptIndex,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Capacity { .. } => ErrorCategory::Capacity,
            Error::Convergence { .. } => ErrorCategory::Convergence,
            Error::CorruptIndex(_) => ErrorCategory::CorruptIndex,
            _ => ErrorCategory::Validation,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
