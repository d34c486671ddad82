use thiserror::Error;

pub type Result<T> = std::result::Result<T, FupError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FupError {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("modulus {n} is not a power of the base {m}")]
    InvalidModulus { n: usize, m: usize },
    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },
    #[error("resource cap exceeded: {requested} > {cap} ({what})")]
    ResourceCap { what: &'static str, requested: usize, cap: usize },
    #[error("line coefficients ({a}, {b}) are not coprime modulo {n}")]
    NotIrreducible { a: i64, b: i64, n: usize },
    #[error("direction ({a}, {b}) is horizontal; use the row test")]
    HorizontalDirection { a: i64, b: i64 },
    #[error("witness construction failed at grid point ({}, {}): {reason}", point.0, point.1)]
    ConstructionFailed { point: (usize, usize), reason: String },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
