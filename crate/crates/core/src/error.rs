use thiserror::Error;

/// Errors produced by the protocol library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),
    #[error("{0} is not a supported prime modulus (must be prime and below 2^32)")]
    NotPrime(u64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("degenerate evaluation points: {0}")]
    DegeneratePoints(String),
    #[error("cannot partition {rows}x{cols} into a {grid_rows}x{grid_cols} grid")]
    Partition {
        rows: usize,
        cols: usize,
        grid_rows: usize,
        grid_cols: usize,
    },
    #[error("index out of range: {0}")]
    Index(String),
    #[error("incomplete block set: missing block ({0}, {1})")]
    Incomplete(usize, usize),
    #[error("field of size {modulus} is too small: need at least {needed} distinct points")]
    FieldTooSmall { modulus: u64, needed: u64 },
    #[error("dimension {dim} is not divisible by {parts}")]
    NotDivisible { dim: usize, parts: usize },
    #[error("{servers} servers cannot meet recovery threshold {threshold}")]
    InsufficientServers { servers: usize, threshold: usize },
    #[error("not enough answers: need {needed}, have {got}")]
    NotEnoughAnswers { needed: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("partitioning with m={m}, n={n} is not supported by this scheme")]
    UnsupportedPartition { m: usize, n: usize },
    #[error("server {0} did not respond and the scheme cannot tolerate stragglers")]
    MissingServer(usize),
    #[error("rank error: {0}")]
    Rank(String),
    #[error("bilinear scheme failed its self-check: {0}")]
    Consistency(String),
    #[error("trace is incomplete: {0}")]
    IncompleteTrace(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
