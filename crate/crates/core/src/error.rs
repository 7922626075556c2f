use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{m} is too large (limit {limit})")]
    FieldTooLarge { p: u32, m: u32, limit: u32 },
    #[error("modulus must be a monic polynomial of degree {expected} over F_{p}")]
    BadModulus { p: u32, expected: u32 },
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} is not reduced mod {p}")]
    UnreducedCoordinate { value: u32, p: u32 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("lcm with the zero polynomial is undefined")]
    LcmWithZero,
    #[error("denominator must be monic and nonzero")]
    NonMonicDenominator,
    #[error("expansion depth must be positive")]
    ZeroDepth,
    #[error("fraction is not reduced: {0}")]
    MalformedFraction(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
