use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate in input vector")]
    NonFiniteInput,

    #[error("input point set is empty")]
    EmptyInput,

    #[error("query vector is not unit norm: |norm - 1| = {deviation:.3e}")]
    NonUnitQuery { deviation: f64 },

    #[error("radius {radius} out of range for dimension {d}")]
    RadiusOutOfRange { radius: usize, d: usize },

    #[error("subset is not a face candidate: {reason}")]
    NotAFaceCandidate { reason: String },

    #[error("hidden set is invalid: {0}")]
    InvalidHiddenSet(String),

    #[error("oracle variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("a round is already open")]
    RoundAlreadyOpen,

    #[error("no open round matches this handle")]
    NoOpenRound,

    #[error("adaptivity violation: {0}")]
    AdaptivityViolation(String),

    #[error("no point in the hidden set has the requested prefix")]
    NoSuchPrefix,

    #[error("hull loop exceeded {max_iterations} iterations; oracle is inconsistent")]
    IterationBudgetExceeded { max_iterations: usize },

    #[error("generated dimension {dim} exceeds the cap {cap}")]
    DimensionCapExceeded { dim: u128, cap: usize },

    #[error("round-one query budget 2^{log2_t:.1} does not fit a machine integer")]
    BudgetNotRunnable { log2_t: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("solver `{solver}` is incompatible with problem `{problem}`")]
    IncompatibleSolver { solver: String, problem: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
