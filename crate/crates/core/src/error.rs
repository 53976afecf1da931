use thiserror::Error;

/// Errors raised by the wave laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration too costly: {0}")]
    Cost(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("point lies outside the observation window (|y| = {norm}, W = {radius})")]
    OutOfWindow { norm: f64, radius: f64 },

    #[error("degenerate partition: {0}")]
    DegeneratePartition(String),

    #[error("grid spacing {h} undersamples the unit wavelength (need h <= 0.25)")]
    Undersampled { h: f64 },

    #[error("unsupported dimension {0} (geometry needs m in {{2, 3}})")]
    UnsupportedDimension(usize),

    #[error("empty mask")]
    EmptyMask,

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("resolution failure: {excluded} of {trials} samples were degenerate (refine h)")]
    Resolution { excluded: usize, trials: usize },

    #[error("degenerate spectral measure: {0}")]
    DegenerateMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
