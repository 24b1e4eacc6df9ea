use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The polynomial has monomials that no combination of minors can produce.
    #[error("not quasiaffine: {} residual monomial(s), first: {}", residual.len(), residual.first().map(String::as_str).unwrap_or("-"))]
    NotQuasiaffine { residual: Vec<String> },

    /// Quasiaffine, but some minor touching the normal column has a nonzero coefficient.
    #[error("interior null Lagrangian but not a null Lagrangian at the boundary: {} offending coefficient(s), first: {}", offending.len(), offending.first().map(String::as_str).unwrap_or("-"))]
    NotBoundaryNl { offending: Vec<String> },

    #[error("growth violation: degree {degree} exceeds p = {p}")]
    GrowthViolation { degree: u32, p: u32 },

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("optimization failure: {0}")]
    OptimizationFailure(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
