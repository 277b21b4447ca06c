use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("outside the supported domain: {0}")]
    Domain(String),
    #[error("no feasible parameters: {0}")]
    Infeasible(String),
    #[error("degenerate channel draw: {0}")]
    Degenerate(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
