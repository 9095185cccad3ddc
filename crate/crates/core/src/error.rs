use thiserror::Error;

/// Errors raised by the physics modules.
///
/// Configuration-file errors have their own type, [`crate::config::ConfigError`],
/// because they carry source positions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{0}` must be strictly positive")]
    NonPositiveParameter(&'static str),

    #[error("frequency must be strictly positive")]
    NonPositiveFrequency,

    #[error("parameter `{0}` is out of range: {1}")]
    OutOfRange(&'static str, String),

    #[error("parameter `{0}` is not available in this input tier")]
    MissingParameter(&'static str),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("adaptive quadrature failed to converge (estimated relative error {0:.3e})")]
    QuadratureNonConvergence(f64),

    #[error("iteration failed to converge: {0}")]
    NotConverged(String),

    #[error("pulse width W = {w:.3e} rad/s exceeds 0.3 W_c = {limit:.3e} rad/s; the narrowband approximation does not apply")]
    ApproximationOutOfRange { w: f64, limit: f64 },

    #[error("target efficiency {target} exceeds the asymptotic ceiling {ceiling}")]
    TargetUnreachable { target: f64, ceiling: f64 },
}
