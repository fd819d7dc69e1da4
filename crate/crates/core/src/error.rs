use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient at exponent {needed} is not trusted (floor {floor})")]
    Untrusted { needed: i32, floor: i32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parity profile mismatch: {0}")]
    Parity(String),
    #[error("operator is not monic of order {0}")]
    NotMonic(i32),
    #[error("complement block is not invertible")]
    NotInvertible,
    #[error("no bracket known for generator {0}")]
    UnknownGenerator(String),
    #[error("input has a nonzero constant term")]
    ConstantTerm,
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("result changed when deepening from depth {depth} to {deeper}")]
    Unstable { depth: i32, deeper: i32 },
    #[error("element does not lie in the W-superalgebra: {0}")]
    NotInW(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
