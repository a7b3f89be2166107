use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("certificate not found: {0}")]
    CertificateNotFound(String),

    #[error("incomplete table: missing subset {0:?}")]
    IncompleteTable(String),

    #[error("not a metric: {reason} (witness {witness:?})")]
    NotAMetric { reason: String, witness: Vec<String> },

    #[error("invalid diversity: {0}")]
    InvalidDiversity(String),

    #[error("expected a diversity on exactly three points, got {0}")]
    NotThreePoints(usize),

    #[error("degenerate quadratic form: 2xy+2xz+2yz-x^2-y^2-z^2 = {0} <= 0")]
    DegenerateQuadratic(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("target {target} outside embeddable range [{lo}, {hi}]")]
    TargetOutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("bisection stalled after {iterations} iterations with gap {gap:e}")]
    BisectionStalled { iterations: usize, gap: f64 },

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("singular system: pivot {pivot:e} in column {column}")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
}
