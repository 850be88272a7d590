use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid margins: {0}")]
    InvalidMargins(String),
    #[error("margins are infeasible: {0}")]
    Infeasible(String),
    #[error("table does not satisfy the margins")]
    NotInPolytope,
    #[error("{what} exceeds the size guard ({limit})")]
    TooLarge { what: String, limit: String },
    #[error("exhaustive genericity check needs p+q <= {limit}, got {got}")]
    TooLargeForExactCheck { got: usize, limit: usize },
    #[error("result set would exceed {limit} items")]
    TooMany { limit: usize },
    #[error("facet characterization needs p*q > 4, got {p}x{q}")]
    LemmaOutOfRange { p: usize, q: usize },
    #[error("instance is degenerate; perturb the margins first")]
    Degenerate,
    #[error("alpha must satisfy 0 < alpha < 1/p")]
    InvalidAlpha,
    #[error("hyperplane passes through a cube vertex")]
    NotGeneric,
    #[error("need at least {need} samples at distinct dilations, got {got}")]
    NeedMoreSamples { need: usize, got: usize },
    #[error("entry bound violated: {0}")]
    BoundViolated(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("walk exceeded its pivot budget: {used} > {budget}")]
    BudgetExceeded { used: usize, budget: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn too_large(what: impl Into<String>, limit: impl ToString) -> Error {
    Error::TooLarge {
        what: what.into(),
        limit: limit.to_string(),
    }
}
