use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("round budget of {budget} exceeded ({unterminated} nodes still running)")]
    RoundBudgetExceeded { budget: usize, unterminated: usize },
    #[error("validity check failed: {0}")]
    ValidityCheckFailed(String),
    #[error("edge {0:?} has a list of {1} colors, needs at least {2}")]
    ListTooSmall((usize, usize), usize, usize),
    #[error("ruling set does not dominate vertex {0}")]
    NotDominating(usize),
    #[error("cluster rooted at {root} has no leaf layer with {needed} leaves (best {best})")]
    InsufficientLeaves { root: usize, needed: usize, best: usize },
    #[error("vertex {0} has no target edge within reach")]
    NoNearbyTarget(usize),
    #[error("hypergraph precondition degraded: min degree {min_degree} <= max rank {max_rank}")]
    PreconditionDegraded { min_degree: usize, max_rank: usize },
    #[error("hypergraph vertex {0} has degree {1}, cannot split")]
    DegreeTooSmall(usize, usize),
    #[error("rearranged edge set is not a matching: {0}")]
    MatchingViolation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("no extension exists: {0}")]
    NoExtension(String),
    #[error("internal invariant broken: {0}")]
    InvariantBroken(String),
    #[error("search budget exceeded after {0} nodes")]
    BudgetExceeded(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
