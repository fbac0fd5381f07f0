use thiserror::Error;

/// Errors raised by the tensor routines and the batch front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A metric (or a metric restricted to the current span) is singular.
    #[error("degenerate metric: pivot {pivot:.3e} below threshold {threshold:.1e}")]
    DegenerateMetric { pivot: f64, threshold: f64 },

    /// A four-index tensor is not antisymmetric in its (1,2) and (3,4) slots.
    #[error("tensor is not antisymmetric in its index pairs (residual {residual:.3e})")]
    PairAntisymmetryViolated { residual: f64 },

    /// An endomorphism expected to be skew-adjoint is not.
    #[error("endomorphism is not skew-adjoint (residual {residual:.3e})")]
    NotSkewAdjoint { residual: f64 },

    /// A self-/skew-adjointness hypothesis of a trace identity fails.
    #[error("adjointness hypothesis violated for {argument} (residual {residual:.3e})")]
    AdjointnessViolated { argument: &'static str, residual: f64 },

    /// A point lies outside the operative domain f_Z > 0 (or a finite
    /// difference stencil leaves it).
    #[error("point outside the domain: {0}")]
    DomainViolation(String),

    /// Invalid batch configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
