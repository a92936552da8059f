use thiserror::Error;

/// Errors raised by matrix operations, expression handling and the calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NcError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("matrix is not positive semidefinite (minimal eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("matrix is singular or too ill-conditioned: {0}")]
    Singular(String),
    #[error("zero matrix cannot be normalized")]
    ZeroMatrix,
    #[error("matrix is not a contraction (norm {norm})")]
    NotContraction { norm: f64 },
    #[error("random generation failed after {attempts} attempts: {what}")]
    GenerationFailure { what: String, attempts: usize },
    #[error("non-finite entry in matrix")]
    NonFinite,
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{name}` exceeds declared arity {arity}")]
    Arity { name: String, arity: usize },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("point does not match variable kind: {0}")]
    KindMismatch(String),
    #[error("block structure violated (residual {residual:e}); not an nc function at this point")]
    BlockStructureViolation { residual: f64 },
    #[error("difference-differential values disagree across r (residual {residual:e})")]
    InconsistentR { residual: f64 },
    #[error("algebraic route refused: {0}")]
    MethodRefused(String),
    #[error("derivative unavailable: {0}")]
    DerivativeUnavailable(String),
    #[error("not an intertwiner (residual {residual:e})")]
    NotIntertwiner { residual: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("interchange format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, NcError>;
