use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A state left the admissible set (non-finite fields, imaginary sound speed).
    #[error("inadmissible state: {0}")]
    Inadmissible(String),

    #[error("non-positive density {value:e}{}", cell.map(|c| format!(" in cell {c}")).unwrap_or_default())]
    NonPositiveDensity { cell: Option<usize>, value: f64 },

    #[error("relaxation speed is zero: no pressure and no internal energy anywhere")]
    DegenerateSpeed,

    /// Raised before any state is modified; `admissible_dt` satisfies the violated bound.
    #[error("step rejected ({constraint}): dt = {dt:e} exceeds admissible {admissible_dt:e}")]
    StepRejected {
        constraint: &'static str,
        dt: f64,
        admissible_dt: f64,
    },

    #[error("banded solver assumption violated: {0}")]
    SolverAssumption(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("expected a finite positive number, got {value}"),
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("expected a finite non-negative number, got {value}"),
        })
    }
}
