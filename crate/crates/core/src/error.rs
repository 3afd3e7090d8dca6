use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge in {op}: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    Convergence {
        op: &'static str,
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("oscillation budget exceeded at x = {x}: {panels} half-period panels needed, limit {limit}")]
    OscillationBudget { x: f64, panels: usize, limit: usize },

    #[error("insufficient derivatives: order {required} needed, {available} available")]
    InsufficientDerivatives { required: usize, available: usize },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    /// True for failures of an internal integral to reach tolerance.
    pub fn is_quadrature(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::OscillationBudget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
