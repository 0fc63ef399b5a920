use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unknown corpus name `{0}`")]
    UnknownName(String),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("polytope is not balanced")]
    NotBalanced,
    #[error("polytope is not Col-divisible")]
    NotColDivisible,
    #[error("internal validation failed: {0}")]
    ValidationFailure(String),
    #[error("polytope has no column vectors")]
    EmptyColumnSet,
    #[error("point {0:?} lies on the doubled facet and has no lift")]
    NotLiftable(Vec<i64>),
    #[error("matrix is not invertible over the coefficient ring")]
    SingularMatrix,
    #[error("operands live on different stages")]
    StageMismatch,
    #[error("sub-span is not invariant: {0}")]
    NotInvariant(String),
    #[error("operation requires a balanced polytope")]
    BalancedRequired,
    #[error("case not covered: {0}")]
    CaseNotCovered(String),
    #[error("vectors do not share the requested base facet")]
    BaseFacetMismatch,
    #[error("letter {0:?} is outside the system")]
    LetterOutsideSystem(Vec<i64>),
    #[error("vector {0:?} is not a column vector of the stage")]
    StageTooSmall(Vec<i64>),
    #[error("graphs are not isomorphic: {0}")]
    NotIsomorphic(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("polygon has no column vectors")]
    NoColumns,
    #[error("polygon could not be classified: {0}")]
    Unclassifiable(String),
    #[error("schema error at {location}: {message}")]
    SchemaError { location: String, message: String },
    #[error("rigidity failure: {0}")]
    RigidityFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaError {
            location: location.into(),
            message: message.into(),
        }
    }
}
