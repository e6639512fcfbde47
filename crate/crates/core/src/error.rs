use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a bijection: {0}")]
    NotBijective(String),
    #[error("gluing permutations do not act transitively: square {unreachable} is unreachable from square 0")]
    NotTransitive { unreachable: usize },
    #[error("size mismatch: {0} squares vs {1} squares")]
    SizeMismatch(usize, usize),
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(String),
    #[error("orbit enumeration stopped after {0} classes")]
    CapExceeded(usize),
    #[error("value {0} is outside (0,1)")]
    OutOfRange(String),
    #[error("partial quotients must be positive, got {0}")]
    NonPositiveQuotient(String),
    #[error("trajectory hits cone vertex {vertex} at parameter {at}")]
    HitsConeVertex { vertex: usize, at: String },
    #[error("segment passes through cone vertex {0} in its interior")]
    ConeVertexInInterior(usize),
    #[error("word too short: need at least {needed} letters, got {got}")]
    WordTooShort { needed: usize, got: usize },
    #[error("segment is parallel to the cylinder direction")]
    ParallelToDecomposition,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("start point lies on a singular leaf (cone vertex {0} reached)")]
    StartOnSingularLeaf(usize),
    #[error("time cap too small: {0}")]
    CapTooSmall(String),
    #[error("diophantine exponent must exceed 1, got {0}")]
    ExponentTooSmall(f64),
    #[error("insufficient data: {0}")]
    InsufficientSpan(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("value does not fit machine integers: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
