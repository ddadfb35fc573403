use thiserror::Error;

/// Errors raised by the metrology engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("M matrix is singular for every regularization value (condition number {condition:e})")]
    SingularM { condition: f64 },

    #[error("v -> 1 extrapolation did not converge: successive extrapolants {previous} and {latest}")]
    NonConvergence { previous: f64, latest: f64 },

    #[error("QFI limit diverges: derivative has a component of relative size {0:e} in the null space of M")]
    DivergentLimit(f64),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("derivative is not finite")]
    NonFiniteDerivative,

    #[error("data set is not estimable: {0}")]
    NotEstimable(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(name: &'static str, value: impl Into<f64>, reason: &'static str) -> Result<T> {
    Err(Error::InvalidParameter {
        name,
        value: value.into(),
        reason,
    })
}
