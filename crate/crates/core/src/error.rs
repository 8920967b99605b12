use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("vanishing order exceeds N_max = {0}")]
    OrderExceedsMax(usize),
    #[error("linear solver failed: {0}")]
    Solver(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
