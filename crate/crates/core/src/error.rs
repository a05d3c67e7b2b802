use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the library.
///
/// Variants split into two families: input validation (a value violates a
/// documented invariant before any computation starts) and numerical
/// failures (a computed result breaches its postcondition). The CLI maps the
/// first family to exit code 2 and the second to exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric (relative residual {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not antisymmetric (relative residual {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("form is degenerate or too ill-conditioned (condition number {0:.3e})")]
    Degenerate(f64),
    #[error("operator is not a complex structure (relative residual of J^2 + I is {0:.3e})")]
    NotComplexStructure(f64),
    #[error("matrix is not symplectic (relative residual {0:.3e})")]
    NotSymplectic(f64),
    #[error("transformation must be invertible with positive determinant (det = {0:.3e})")]
    NotOrientationPreserving(f64),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("complex structure does not tame the skew form: {0}")]
    NotTamed(String),
    #[error("invalid Hodge data: {0}")]
    Hodge(String),
    #[error("Riemann conditions fail: {0}")]
    Riemann(String),
    #[error("invalid ring model: {0}")]
    RingModel(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("multiplier is not invariant under the involution: {0}")]
    NotInvolutionInvariant(String),
    #[error("multiplier is not normalized: {0}")]
    NotNormalized(String),
    #[error("skew form has odd rank {0}")]
    OddRank(usize),
    #[error("form is not unimodular (|det| = {0})")]
    NotUnimodular(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("theta truncation radius {radius:.2} exceeds the hard cap {cap}")]
    TruncationUnreachable { radius: f64, cap: f64 },
    #[error("postcondition failed: {0}")]
    Postcondition(String),
}

impl Error {
    /// True for failures of a computed postcondition, false for rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Postcondition(_) | Error::TruncationUnreachable { .. }
        )
    }
}
