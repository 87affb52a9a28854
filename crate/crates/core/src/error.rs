use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is not supported (need p >= 5)")]
    UnsupportedCharacteristic(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field order exceeds 2^32")]
    FieldTooLarge,
    #[error("element is not a square")]
    NotASquare,
    #[error("no embedding recorded between these fields")]
    NoEmbedding,
    #[error("{q} is not a power of the characteristic {p}")]
    NotPowerOfCharacteristic { q: u64, p: u64 },
    #[error("singular curve: 4a^3 + 27b^2 = 0")]
    SingularCurve,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A hypothesis of the construction is violated (e.g. p does not divide k).
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("{what}: {needed} exceeds enumeration budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        budget: u64,
    },
    /// Exact division expected by a closed form left a remainder.
    #[error("non-exact division in {0}")]
    NonExactDivision(String),
    #[error("generator matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    /// A measured quantity contradicts its closed form.
    #[error("certification mismatch: {0}")]
    CertificationMismatch(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("internal contradiction: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) => 2,
            Error::BudgetExceeded { .. } => 3,
            Error::CertificationMismatch(_) | Error::NonExactDivision(_) => 4,
            _ => 1,
        }
    }
}
