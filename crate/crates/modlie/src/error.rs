use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field mismatch: F_{0} vs F_{1}")]
    FieldMismatch(u64, u64),
    #[error("0^0 is undefined for plain pow; use pow0")]
    ZeroToZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape mismatch")]
    ShapeMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no embedding of F_{0} into F_{1}")]
    NoEmbedding(u64, u64),
    #[error("degenerate specialization")]
    DegenerateSpecialization,
    #[error("not alternating in characteristic two")]
    NotAlternatingInCharTwo,
    #[error("not an isomorphism: first failing pair {pair:?}, rank {rank}")]
    NotIsomorphism { pair: Option<(usize, usize)>, rank: usize },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("construction check failed: {0}")]
    Check(String),
}

pub type Result<T> = std::result::Result<T, Error>;
