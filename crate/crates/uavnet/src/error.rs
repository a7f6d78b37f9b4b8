//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by configuration validation, geometry domain checks, the
/// association logic, and the numerical integration layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    /// A configuration field violates a model constraint.
    #[error("invalid config: {field}: {reason}")]
    Config { field: &'static str, reason: String },

    /// An argument fell outside the domain of a channel/geometry primitive.
    #[error("domain error in {what}: {reason}")]
    Domain { what: &'static str, reason: String },

    /// A realization cannot be classified (no base station in the window).
    #[error("degenerate realization: no base station to associate with")]
    DegenerateRealization,

    /// An adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature for {context} did not converge: error estimate {error:.3e} exceeds budget {budget:.3e}")]
    QuadratureNonConvergence {
        context: &'static str,
        error: f64,
        budget: f64,
    },
}

impl ModelError {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        ModelError::Config {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(what: &'static str, reason: impl Into<String>) -> Self {
        ModelError::Domain {
            what,
            reason: reason.into(),
        }
    }
}
