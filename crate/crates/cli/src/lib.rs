//! Configuration-driven experiments over the `mixnorm` library.
//!
//! A run reads a flat `key=value` configuration, validates it, evaluates one
//! experiment and writes a CSV or JSON table. Result bytes depend only on the
//! configuration; wall-clock data goes to a separate metadata file.

pub mod config;
pub mod experiments;
pub mod table;

use std::path::PathBuf;

pub use config::{Config, ExperimentConfig};
pub use experiments::{describe, run, Experiment, Outcome};
pub use table::{emit, Format, Table, Value};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("numerical anomaly: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no results")]
    NoResults,
}

impl CliError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::NoResults => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<mixnorm::Error> for CliError {
    fn from(e: mixnorm::Error) -> Self {
        use mixnorm::Error as E;
        match e {
            E::InvalidParameter { name, reason } => CliError::validation(name, reason),
            E::NumericalAnomaly(msg) => CliError::Numerical(msg),
            E::NonFinite { coords } => CliError::Numerical(format!("non-finite sample at {coords:?}")),
            E::GridMismatch { field } => CliError::validation(field, "grids differ"),
            E::DimensionOverflow(d) => CliError::validation("d", format!("dimension {d} outside 1..=3")),
            E::TooCoarse(msg) => CliError::validation("resolution", msg),
            E::NonIntegralShift { axis, cells } => {
                CliError::validation("shift", format!("axis {axis}: {cells} cells is not whole"))
            }
            E::OutOfRange(msg) => CliError::validation("range", msg),
            E::ZeroNorm(what) => CliError::validation("input", format!("{what} vanishes")),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
