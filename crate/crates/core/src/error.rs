use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("capability exceeded: {0}")]
    Capability(String),
    /// Data that contradicts a structural guarantee (e.g. a non-reduced fiber on a
    /// quartic that was assumed smooth).
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate restriction: {0}")]
    Degenerate(String),
    #[error("not elliptic: {0}")]
    NotElliptic(String),
    #[error("audit failure: {0}")]
    Audit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
