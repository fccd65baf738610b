use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite argument")]
    NonFinite,

    /// `exp(-z^2)` is not representable; only reachable deep in the lower half-plane.
    #[error("exp(-z^2) overflows for z = {re} + {im}i")]
    Overflow { re: f64, im: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge after {evaluations} evaluations (estimated error {est_error:e})")]
    NoConvergence { evaluations: usize, est_error: f64 },

    #[error("grid propagation contaminated by the periodic boundary (edge density {edge_density:e})")]
    BoundaryContamination { edge_density: f64 },

    #[error("computation cancelled")]
    Cancelled,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
