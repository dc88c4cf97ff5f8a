//! User-facing surface: configuration, orchestration and file formats.

pub mod config;
pub mod kernel_cache;
pub mod output;
pub mod runner;

pub use config::{load_config, load_config_file, InitialState, RunConfig};
pub use runner::{
    apply_sweep_value, converge, run, run_to_path, sweep, RunSummary, SweepParameter, SweepPoint,
    SweepSpec,
};

use crate::error::Error;

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::InvalidState(_) => 2,
        Error::TraceDrift { .. } | Error::Numeric(_) | Error::Io(_) => 3,
    }
}
