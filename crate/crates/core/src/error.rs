//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its panel budget. The partial estimate
    /// and its error bound are carried so callers can diagnose divergence.
    #[error("quadrature did not converge: estimate {estimate:e} +/- {error_bound:e} after {panels} panels")]
    Convergence {
        estimate: f64,
        error_bound: f64,
        panels: usize,
    },

    /// The grid cannot resolve the requested computation (aliasing or
    /// bandlimit diagnostics failed).
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Mismatched array or grid shapes.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A sampling or evaluation budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A square root of a negative quantity was requested without an
    /// explicit complex-branch policy.
    #[error("branch violation: {0}")]
    Branch(String),

    /// A parameter makes the operation degenerate (e.g. vanishing leading
    /// coefficient or resummation denominator).
    #[error("degenerate parameter: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
