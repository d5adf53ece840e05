use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One refinement step recorded by the convergence controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementStep {
    pub aperture_resolution: usize,
    pub panel_order: usize,
    pub power: f64,
    /// Relative change against the previous step (`NaN` for the first one).
    pub rel_change: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("beam path intersects terrain: {0}")]
    Terrain(String),

    #[error("configuration parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{field}`: {constraint}")]
    Validation { field: String, constraint: String },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("convergence failure: {message} (last iterates: {last:?})")]
    Convergence {
        message: String,
        last: Option<(f64, f64)>,
        history: Vec<RefinementStep>,
    },

    #[error(
        "calibration failed: reference power {reference} W unattainable for C_ext in [{lo:e}, {hi:e}] m² \
         (powers {power_lo} W .. {power_hi} W)"
    )]
    Calibration {
        reference: f64,
        lo: f64,
        hi: f64,
        power_lo: f64,
        power_hi: f64,
    },

    #[error("degenerate irradiance map: {0}")]
    DegenerateMap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    /// Process exit status used by the command-line driver.
    ///
    /// 1: validation, 2: numerical, 3: I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidGeometry(_)
            | Error::InvalidArgument(_)
            | Error::Domain(_)
            | Error::Terrain(_)
            | Error::Parse { .. }
            | Error::Validation { .. } => 1,
            Error::Resolution(_)
            | Error::Numerical(_)
            | Error::Convergence { .. }
            | Error::Calibration { .. }
            | Error::DegenerateMap(_) => 2,
            Error::Io(_) => 3,
        }
    }
}
