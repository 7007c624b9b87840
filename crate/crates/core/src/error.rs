use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coefficient spec: {0}")]
    InvalidCoefficients(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operation requires a field, got {0}")]
    NotAField(String),
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("invalid cell complex: {0}")]
    InvalidComplex(String),
    #[error("invalid cellular map: {0}")]
    InvalidMap(String),
    #[error("invalid open/closed set: {0}")]
    InvalidSubset(String),
    #[error("invalid representation or complex: {0}")]
    InvalidRep(String),
    #[error("subdivision bound {0} exceeded before the map became simplicial")]
    SubdivisionBound(usize),
    #[error("not a local system on the given cells: {0}")]
    NotLocalSystem(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("fixture {fixture} failed validation: {invariant}")]
    FixtureValidation { fixture: String, invariant: String },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
