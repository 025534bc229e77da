use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("derivative order {requested} exceeds budget {budget}")]
    BudgetExceeded { requested: usize, budget: usize },
    #[error("{what} did not converge (last disagreement {disagreement:.3e})")]
    Convergence { what: String, disagreement: f64 },
    #[error("errors outside the trusted fit window: {0}")]
    Window(String),
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    #[error("order {p} unsupported here (cap {cap}); use the corollary bound")]
    UnsupportedOrder { p: usize, cap: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
