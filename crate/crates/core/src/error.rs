use thiserror::Error;

/// Errors raised by the exact and numeric routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("invalid exponential generator: {0}")]
    InvalidGenerator(String),
    #[error("division by the zero fraction")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("matrix is not skew-symmetric: {0}")]
    NotSkew(String),
    #[error("matrix is not unitary: {0}")]
    NotUnitary(String),
    #[error("coframe is not admissible: {0}")]
    NotAdmissible(String),
    #[error("form is not a contact form: {0}")]
    NonContact(String),
    #[error("denominator vanishes: {0}")]
    Pole(String),
    #[error("point is not fixed by the map: {0}")]
    NotFixed(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("metric is not positive definite: {0}")]
    NotPositive(String),
    #[error("not a model CR map: {0}")]
    StructureViolation(String),
    #[error("unsupported tensor valence: {0}")]
    UnsupportedValence(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("decay fit outside tolerance: {0}")]
    DecayFit(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
