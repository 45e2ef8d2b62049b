use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input must be nonzero")]
    ZeroInput,

    #[error("{0} is not squarefree")]
    NotSquarefree(i64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("curve is singular (discriminant 0)")]
    SingularCurve,

    #[error("model is not integral at {0}")]
    NotIntegral(u64),

    #[error("model is not minimal at p = {0}")]
    NotMinimalAtP(u64),

    #[error("curve has bad reduction at p = {0}")]
    BadReduction(u64),

    #[error("prime {0} is too small (need p >= 5)")]
    SmallPrime(u64),

    #[error("mod-l image requires l >= 3, got {0}")]
    InvalidL(u64),

    #[error("root number ambiguous (discrepancies {plus:e} for w=+1, {minus:e} for w=-1)")]
    RootNumberAmbiguous { plus: f64, minus: f64 },

    #[error("series length {needed} exceeds cap {cap}")]
    PrecisionExhausted { needed: usize, cap: usize },

    #[error("no rational with denominator <= {max_den} within {tolerance:e} of {value}")]
    RecognitionFailed {
        value: f64,
        max_den: u64,
        tolerance: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
