use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has determinant {0}, expected 1")]
    InvalidMatrix(String),
    #[error("matrix is scalar (plus or minus the identity)")]
    ScalarInput,
    #[error("matrix is not hyperbolic")]
    NotHyperbolic,
    #[error("matrix is not normalized (need c > 0 and trace > 2)")]
    NotNormalized,
    #[error("gamma must be normalized (c > 0, trace > 2)")]
    GammaNotNormalized,
    #[error("gamma must be primitive")]
    GammaNotPrimitive,
    #[error("sigma must be hyperbolic")]
    SigmaNotHyperbolic,
    #[error("arguments are not coprime")]
    NotCoprime,
    #[error("form has zero leading coefficient")]
    DegenerateLeadingCoefficient,
    #[error("invalid quadratic irrational: {0}")]
    InvalidQuadIrr(String),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("invalid continued fraction word: {0}")]
    InvalidWord(String),
    #[error("conjugate expansion precondition violated")]
    PreconditionViolated,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("imaginary part must be positive")]
    NonPositiveImaginaryPart,
    #[error("point too close to the real axis for the truncation (Im = {0})")]
    DomainTooLow(f64),
    #[error("truncation {0} too small")]
    TruncationTooSmall(usize),
    #[error("too close to a pole (|j(tau) - j(z)| = {0})")]
    PoleProximity(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
