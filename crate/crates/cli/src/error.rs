use std::path::PathBuf;

use thiserror::Error;
use xxz_roots::bethe::BetheError;
use xxz_roots::model::ModelError;
use xxz_roots::spectra::SpectraError;
use xxz_roots::thermo::ThermoError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid parameters: {0}")]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Bethe(#[from] BetheError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("{failed} check(s) failed; see {manifest}")]
    ChecksFailed { failed: usize, manifest: PathBuf },
}

impl CliError {
    /// 1 for anything the caller can fix or a failed check, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spectra(SpectraError::TooFewPoints(_)) => 1,
            CliError::Spectra(_) => 2,
            CliError::Bethe(BetheError::Inhomogeneous | BetheError::Unknowns { .. } | BetheError::Model(_)) => 1,
            CliError::Bethe(_) => 2,
            CliError::Thermo(ThermoError::Pole { .. } | ThermoError::VanishingKernel(_) | ThermoError::ComplexDensity(_)) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
