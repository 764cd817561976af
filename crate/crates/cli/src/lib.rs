//! Command-line front end for the squeezing-measurement predictions:
//! config ingestion, parameter sweeps, figure regeneration, verification
//! suites, CSV/SVG emission.

pub mod config;
pub mod figures;
pub mod svg;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Validation(sqz_core::params::ParamError),
    #[error("series evaluation failed: {0}")]
    Series(sqz_core::series::SeriesError),
    #[error("kernel oracle failed: {0}")]
    Kernel(sqz_core::kernel::KernelError),
    #[error("{0}")]
    InvalidArg(String),
}

impl From<sqz_core::params::ParamError> for CliError {
    fn from(e: sqz_core::params::ParamError) -> Self {
        CliError::Validation(e)
    }
}

impl From<sqz_core::series::SeriesError> for CliError {
    fn from(e: sqz_core::series::SeriesError) -> Self {
        CliError::Series(e)
    }
}

impl From<sqz_core::kernel::KernelError> for CliError {
    fn from(e: sqz_core::kernel::KernelError) -> Self {
        CliError::Kernel(e)
    }
}

/// 17-significant-digit float serialisation used in every CSV cell.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Truncation policy honoring the SQZ_PRECISION_DIGITS override.
pub fn policy_from_env() -> Result<sqz_core::series::TruncationPolicy, CliError> {
    let mut pol = sqz_core::series::TruncationPolicy::default();
    if let Ok(raw) = std::env::var("SQZ_PRECISION_DIGITS") {
        let digits: u32 = raw.parse().map_err(|_| {
            CliError::InvalidArg(format!(
                "SQZ_PRECISION_DIGITS must be a positive integer (got {raw:?})"
            ))
        })?;
        pol.precision_digits = sqz_core::series::PrecisionDigits::Fixed(digits);
    }
    Ok(pol)
}
