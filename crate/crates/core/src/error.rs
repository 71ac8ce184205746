use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("p-adic operands have different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("argument is not a unit")]
    NotUnit,
    #[error("no square root exists")]
    NoSquareRoot,
    #[error("singular Weierstrass model (discriminant is zero)")]
    SingularModel,
    #[error("scaling factor u must be nonzero")]
    ZeroScale,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("model is not minimal at p = {0}")]
    NotMinimal(u64),
    #[error("minimality at p = {0} cannot be decided from the discriminant and c4 alone")]
    MinimalityUnknown(u64),
    #[error("value is not integral at p = {0}")]
    NonIntegral(u64),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("[{0}]P is the identity")]
    TorsionMultiple(i64),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("no closed form fits the data: {0}")]
    FitFailure(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("canonical height did not converge (last estimate {last})")]
    ConvergenceFailure { last: f64 },
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse grouping used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The inputs or hypotheses are wrong.
    Input,
    /// A precision, size or iteration budget ran out.
    Resource,
    /// A computed result disagrees with what it should be.
    Verification,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::PrecisionExhausted(_) | Error::ResourceLimit(_) | Error::ConvergenceFailure { .. } => {
                ErrorClass::Resource
            }
            Error::FitFailure(_) | Error::InternalInconsistency(_) => ErrorClass::Verification,
            _ => ErrorClass::Input,
        }
    }
}
