use thiserror::Error;

/// Errors raised by every layer of the engine.
///
/// Variants map onto CLI exit codes: contract violations exit 2,
/// non-stabilization exits 3 and internal invariant breaches exit 4.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d∘d ≠ 0 at degree {degree}")]
    NotAComplex { degree: i32 },
    #[error("not a chain map at degree {degree}")]
    NotAChainMap { degree: i32 },
    #[error("invalid cell complex: {0}")]
    InvalidComplex(String),
    #[error("diamond condition fails between {lower} and {upper}: {reason}")]
    Diamond {
        lower: String,
        upper: String,
        reason: String,
    },
    #[error("unknown cell id {0:?}")]
    UnknownCell(String),
    #[error("simplexes are not downward closed: {0}")]
    NotDownwardClosed(String),
    #[error("set is not {expected}: {reason}")]
    Classification { expected: String, reason: String },
    #[error("complex is not simplicial")]
    NotSimplicial,
    #[error("map is not order preserving: {0}")]
    NotMonotone(String),
    #[error("functoriality fails on cells {0}")]
    Functoriality(String),
    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),
    #[error("invalid t-model: {0}")]
    InvalidModel(String),
    #[error("unknown catalog model {0:?}")]
    UnknownModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("tower did not stabilize")]
    NotStabilized,
    #[error("internal invariant breached: {0}")]
    Internal(String),
    #[error("input format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotStabilized => 3,
            Error::Internal(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
