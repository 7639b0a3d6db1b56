//! File-based workflow behind the `nsdamp` binary: runs with ledger,
//! manifest and checkpoints on disk, parameter sweeps, verification suites
//! and resumption.
//!
//! Each `cmd_*` function returns a process exit code: 0 on success, 2 for a
//! user or configuration error, 3 for a numerical failure or a failed check.

mod manifest;
mod run;
mod sweep;
mod verify;

use std::path::Path;

pub use manifest::{sha256_hex, FileEntry, RunManifest};
pub use run::{
    cmd_resume, cmd_run, evaluate_checks, resume_run, run_to_dir, CheckLine, RunOutcome,
};
pub use sweep::{cmd_sweep, regenerate_summary, run_sweep, SweepGrid, SweepPoint, SweepSpec};
pub use verify::{
    cmd_verify, monotonicity_lines, norm_lines, oracle_lines, projector_lines, run_suite, Suite,
    VerifyLine,
};

use crate::config::SolverConfig;
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable consulted for the sweep worker count.
pub const WORKERS_ENV: &str = "NSDAMP_WORKERS";

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BlowUp { .. }
        | Error::NonFinite { .. }
        | Error::NotHermitian { .. }
        | Error::NonMonotoneTime { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// Reads a run configuration and applies a seed override.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::from_path(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Worker count: explicit value, else [`WORKERS_ENV`], else logical cores.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    if let Some(w) = explicit {
        return if w == 0 {
            Err(Error::Config("--workers must be >= 1".into()))
        } else {
            Ok(w)
        };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(Error::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
