use crate::rat::Rat;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },

    #[error("probabilities sum to {0}")]
    ProbabilitySum(Rat),

    #[error("{path}: negative value {value}")]
    Negative { path: String, value: Rat },

    #[error("{path}: duplicate atom")]
    DuplicateAtom { path: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid bundling partition: {0}")]
    InvalidPartition(String),

    #[error("enumeration cap exceeded: {required} candidates required, cap is {cap}")]
    CapExceeded { required: String, cap: u64 },

    #[error("problem too large: {what} = {size} exceeds {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },

    #[error("menu is not deterministic: entry {0} has a fractional allocation")]
    NonDeterministicMenu(usize),

    #[error("infinite price at subset {0}")]
    InfinitePrice(u32),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),

    #[error("matrix is not positive definite: leading minor {0} is {1}")]
    NotPositiveDefinite(usize, Rat),

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("invalid parameter {name}: {msg}")]
    InvalidParam { name: String, msg: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), msg: msg.into() }
    }
}
