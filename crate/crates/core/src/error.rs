use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// The evaluation point coincides with an atom, where `(z - x)^{-1/2}`
    /// is infinite.
    #[error("evaluation point coincides with atom {atom}")]
    Singularity { atom: f64 },

    #[error("numeric domain error at atom {atom}: {what}")]
    NumericDomain { atom: f64, what: String },

    #[error("quadrature did not converge: estimated error {achieved:e} above tolerance {requested:e}")]
    QuadratureFailure { achieved: f64, requested: f64 },

    #[error("degenerate sample: {0}")]
    Degenerate(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
