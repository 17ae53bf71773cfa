use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be an odd prime, got {0}")]
    InvalidModulus(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("central character omega must be nonzero")]
    ZeroOmega,
    #[error("{0} is not a nonsquare mod {1}")]
    NotNonsquare(u32, u32),
    #[error("matrix is not in SL(2): determinant {0}")]
    NotSpecialLinear(u32),
    #[error("Gauss sum with c = 0 degenerates")]
    DegenerateGaussSum,
    #[error("order {0} exceeds supported bound {1}")]
    OrderTooLarge(usize, usize),
    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),
    #[error("oracle size guard: N = {0} exceeds {1}")]
    OracleTooLarge(u32, u32),
    #[error("basis expansion failed: {0}")]
    BasisExpansion(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("mass must be nonzero")]
    ZeroMass,
    #[error("singular matrix")]
    Singular,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
