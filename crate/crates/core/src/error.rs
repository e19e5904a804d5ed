//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the inference engine.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("mechanism domain error: {0}")]
    MechanismDomain(String),

    #[error("audit domain too large: {evals} evaluations exceed the 1e7 guard")]
    AuditTooLarge { evals: u64 },

    #[error("estimator failure: {0}")]
    EstimatorFailure(String),

    #[error("training diverged at epoch {epoch}: loss {loss} exceeded 10x initial {initial}")]
    TrainingDiverged { epoch: usize, loss: f64, initial: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("sampler did not converge: max split-Rhat {rhat:.4} on coordinate {coordinate}")]
    SamplerNotConverged { rhat: f64, coordinate: usize },

    #[error("rejection cap exceeded: {attempts} attempts for particle {particle} at tolerance {tolerance}")]
    RejectionCapExceeded { attempts: u64, particle: usize, tolerance: f64 },

    #[error("unknown dataset `{name}`; available: {available}")]
    UnknownDataset { name: String, available: String },

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("run directory is locked: {0}")]
    RunDirLocked(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl CoreError {
    pub fn invalid_config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CoreError::InvalidConfig { field: field.into(), message: message.into() }
    }
}
