use thiserror::Error;

/// Errors raised while building or operating on networks and edge functions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("loop edge at vertex '{0}'")]
    LoopEdge(String),

    #[error("duplicate edge '{0}'-'{1}'")]
    DuplicateEdge(String, String),

    #[error("nonpositive conductance {c} on edge '{u}'-'{v}'")]
    NonpositiveConductance { u: String, v: String, c: f64 },

    #[error("duplicate vertex '{0}'")]
    DuplicateVertex(String),

    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),

    #[error("disconnected graph: vertex '{0}' unreachable from '{1}'")]
    Disconnected(String, String),

    #[error("network must have at least one edge")]
    Empty,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("mismatched operands: {0}")]
    Mismatch(String),

    #[error("grid size {0} must be even and at least 2")]
    InvalidGrid(usize),

    #[error("tau = {0} is not a multiple of 1/N")]
    UnalignedTau(f64),

    #[error("tau = {tau} exceeds extension horizon {horizon}")]
    BeyondHorizon { tau: f64, horizon: usize },

    #[error("lambda = {0} lies on the Dirichlet set (pi n)^2")]
    DirichletValue(f64),

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
