use thiserror::Error;

/// Errors raised by the flywheel model, stress solver and optimizer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlywheelError {
    /// An argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A curve parameter lies outside `[0, S]`.
    #[error("parameter u = {u} outside curve domain [{lo}, {hi}]")]
    Domain { u: f64, lo: f64, hi: f64 },

    /// The profile is not a valid flywheel geometry (for example `dr/du <= 0`).
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// A numerical procedure failed (singular system, non-finite values, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A configuration document is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, FlywheelError>;
