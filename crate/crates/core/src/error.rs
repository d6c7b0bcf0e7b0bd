use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite sample value at node {coords:?}")]
    NonFinite { coords: Vec<f64> },

    #[error("grid mismatch in `{field}`")]
    GridMismatch { field: &'static str },

    #[error("dimension overflow: {0} axes requested, at most 3 supported")]
    DimensionOverflow(usize),

    #[error("grid too coarse: {0}")]
    TooCoarse(String),

    #[error("shift of {cells} cells on axis {axis} is not a whole number of cells")]
    NonIntegralShift { axis: usize, cells: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("zero norm: {0}")]
    ZeroNorm(&'static str),

    #[error("numerical anomaly: {0}")]
    NumericalAnomaly(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Integrability exponents are accepted in `[1, inf]`.
pub(crate) fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(name, format!("{p} is outside [1, inf]")));
    }
    Ok(())
}
