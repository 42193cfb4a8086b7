use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("edge {edge}: weight must be finite and positive, got {weight}")]
    NonPositiveWeight { edge: String, weight: f64 },

    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("family is empty: {0}")]
    EmptyFamily(String),

    #[error("family is trivial: {0}")]
    TrivialFamily(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("operation requires an undirected graph")]
    Directed,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("solution did not converge: {0}")]
    NotConverged(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
