use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZakError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coordinate {value} is not a node of the {axis} grid (nearest index {nearest}, offset {offset:.3e} cells)")]
    OffGrid {
        axis: char,
        value: f64,
        nearest: i64,
        offset: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("comb-sum truncation tail {tail:.3e} exceeds tolerance {tolerance:.3e} (raise M_max)")]
    Truncation { tail: f64, tolerance: f64 },

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    Unnormalized { norm_sq: f64 },

    #[error("degenerate logical state: raw trace {raw_trace:.3e} has no support on the correctable patch")]
    DegenerateLogical { raw_trace: f64 },

    #[error("logical index {index} out of range for dimension {dimension}")]
    LogicalIndex { index: usize, dimension: usize },

    #[error("operation requires a qubit code (K = 2), got K = {0}")]
    UnsupportedDimension(usize),

    #[error("mixture probabilities must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidMixture { sum: f64 },

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ZakError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ZakError>;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ZakError::InvalidArgument(format!(
            "{name} must be a positive finite number, got {value}"
        )))
    }
}
