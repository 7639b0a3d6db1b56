use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("field is not Hermitian: max asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("non-finite sample in physical field (component {component}, index {index})")]
    NonFinite { component: usize, index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle budget exceeded: {requested} > {cap} ({what})")]
    BudgetExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical blow-up at step {step} (t = {t}): first non-finite coefficient in component {component} at mode {mode:?}")]
    BlowUp {
        step: u64,
        t: f64,
        component: usize,
        mode: [i64; 3],
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("checkpoint is incompatible with the configuration: {0}")]
    Incompatible(String),

    #[error("ledger time must increase strictly: {prev} -> {next}")]
    NonMonotoneTime { prev: f64, next: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
