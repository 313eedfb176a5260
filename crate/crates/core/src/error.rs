use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("evaluation at or too close to a pole: {0}")]
    Pole(String),

    #[error("integration failed at x = {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("cross-check failed for {what}: discrepancy {discrepancy:e} exceeds {tolerance:e}")]
    CrossCheck {
        what: String,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("eigenvalue search failed: {0}")]
    Eigen(String),

    #[error("wrong regime: {0}")]
    Regime(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
