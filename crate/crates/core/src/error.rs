use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("defining polynomial is not monic of positive degree")]
    NotMonic,
    #[error("defining polynomial is reducible; factor {witness:?} (low-to-high)")]
    Reducible { witness: Vec<u32> },
    #[error("field of order {order} exceeds the cap {cap}")]
    FieldTooLarge { order: u64, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("no embedding of a degree-{src} field into a degree-{dst} field")]
    NoEmbedding { src: usize, dst: usize },
    #[error("zero element where a nonzero one is required")]
    ZeroElement,
    #[error("zero entry in a Milnor symbol")]
    ZeroEntry,
    #[error("function has a pole at the place")]
    PoleAtPlace,
    #[error("place of residue degree {degree} exceeds the bound {bound}")]
    DegreeOverflow { degree: usize, bound: usize },
    #[error("torus coordinate is not a unit at the place")]
    NotIntegral,
    #[error("tensor factor has positive free rank")]
    InfiniteFactor,
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
