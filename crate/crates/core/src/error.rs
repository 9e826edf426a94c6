use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid mode {mode} for a {modes}-mode state")]
    InvalidMode { mode: usize, modes: usize },

    #[error("numerical conditioning failure: {0}")]
    NumericalConditioning(String),

    #[error("improbable branch: probability {probability:e} below threshold")]
    ImprobableBranch { probability: f64 },

    #[error("signal is stationary at phi = {phi}: derivative {derivative:e}")]
    SignalStationary { phi: f64, derivative: f64 },

    #[error("degenerate branch {index}: probability {probability:e}")]
    DegenerateBranch { index: usize, probability: f64 },

    #[error("state is not pure: purity {purity}")]
    PurityViolation { purity: f64 },
}

pub type CoreResult<T> = Result<T, CoreError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> CoreResult<T> {
    Err(CoreError::Domain(msg.into()))
}
