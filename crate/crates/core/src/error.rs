use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("full-space propagator limited to N <= {max}, got N = {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("density matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("malformed archive at line {line}: {msg}")]
    Archive { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
