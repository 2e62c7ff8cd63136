use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty pattern")]
    EmptyPattern,

    #[error("invalid bit string {0:?}: expected only '0' and '1'")]
    Parse(String),

    #[error("pattern length {m} exceeds text length {n}")]
    PatternTooLong { m: usize, n: usize },

    #[error("text length {n} exceeds the enumeration limit {limit}")]
    Capacity { n: usize, limit: usize },

    #[error("moment order {0} outside 1..=4")]
    MomentOrder(usize),

    #[error("variance is zero; normality diagnostics are undefined")]
    DegenerateVariance,

    #[error("mean must be positive")]
    NonPositiveMean,

    #[error("pattern length {m} outside the search range 1..={max}")]
    SearchRange { m: usize, max: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),

    /// An exhaustive check contradicted a proven statement. Always a bug.
    #[error("verification failed: {0}")]
    Verification(String),
}
