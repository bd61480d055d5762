//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by tree parsing, model construction, counting and the
/// polyhedral solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (Newick, group spec, clade syntax, plan JSON).
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally invalid tree (duplicate labels, bad root, ...).
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    /// An edge reference does not resolve to an edge of the tree.
    #[error("unknown edge {0}")]
    UnknownEdge(String),

    /// Operation requires an interior edge.
    #[error("edge {0} is not an interior edge")]
    NotInterior(String),

    /// Operation requires a pendant edge (a leaf edge or the root edge).
    #[error("edge {0} is not a pendant edge")]
    NotPendant(String),

    /// Mixed objects built over different groups or trees.
    #[error("incompatible operands: {0}")]
    Incompatible(String),

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Leaf assignment does not cover the non-root leaves.
    #[error("incomplete assignment: {0}")]
    IncompleteAssignment(String),

    /// Ill-formed decomposition plan.
    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    /// Fiber tables disagree on sockets or do not match the plan.
    #[error("socket mismatch: {0}")]
    SocketMismatch(String),

    /// Fiber tables or keys disagree on the total degree.
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    /// A configured enumeration or memory budget would be exceeded.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// Linear program has no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Index or argument out of range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn invalid_tree(msg: impl Into<String>) -> Self {
        Error::InvalidTree(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::BudgetExceeded(msg.into())
    }
}
