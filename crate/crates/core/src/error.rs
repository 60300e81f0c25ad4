use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("no flux reversal on the varied axis (ñ·cosh ratio = {ratio} < 1)")]
    NoSwitch { ratio: f64 },
    #[error("no sign change of the flux in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("flux is zero; Fano factor undefined")]
    ZeroFlux,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("unknown parameter name `{0}`")]
    UnknownParameter(String),
    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),
    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
