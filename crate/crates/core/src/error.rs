use thiserror::Error;

/// Errors shared across the whole crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero (or a value indistinguishable from zero)")]
    DivideByZero,
    #[error("precision exhausted: fewer than one significant digit would remain")]
    PrecisionExhausted,
    #[error("operation undefined on zero")]
    UndefinedOnZero,
    #[error("value is not a square in Q_p")]
    NotASquare,
    #[error("operands belong to different p-adic contexts")]
    ContextMismatch,
    #[error("rotations belong to different kappa classes")]
    KappaMismatch,
    #[error("matrix is not special orthogonal for the given form")]
    NotOrthogonal,
    #[error("form is isotropic, not definite")]
    NotDefinite,
    #[error("value has negative valuation, not a p-adic integer")]
    NotIntegral,
    #[error("no form exists with the requested rank, discriminant and Hasse invariant")]
    NoSuchForm,
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("(a, c) is not a valid first column: a^2 + alpha c^2 != 1")]
    InvalidColumn,
    #[error("vector does not lie in the plane orthogonal to the axis")]
    NotInPlane,
    #[error("the identity fixes every vector; it has no unique axis")]
    IdentityHasNoAxis,
    #[error("operation is not available for this prime: {0}")]
    UnsupportedPrime(&'static str),
    #[error("enumeration budget exceeded")]
    BudgetExceeded,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("internal consistency check failed: {0}")]
    Internal(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
