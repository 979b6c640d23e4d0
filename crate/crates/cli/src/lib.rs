//! Experiment runner behind the `pqapprox` binary.
//!
//! Flags (and an optional TOML file) resolve into a [`RunConfig`], [`run`]
//! turns it into a [`ResultTable`], and [`table::emit`] writes CSV or JSON.

pub mod config;
pub mod run;
pub mod table;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{Cli, Command, Format, Number, ParamPlan, RunConfig};
pub use run::{run, Outcome};
pub use table::ResultTable;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "PQAPPROX_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("computation failed: {0}")]
    Compute(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for usage errors, 1 for everything that fails after validation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Sizes the global rayon pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool that already exists (tests calling in twice) is not an error.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Resolve, run and emit. A recurrence check that finds a nonzero residual
/// still writes its table before reporting the failure.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let config = config::resolve(cli)?;
    let outcome = run(&config)?;
    table::emit(&outcome.table, config.output, config.out.as_deref())?;
    if config.plot {
        // `resolve` guarantees an output path whenever a plot is requested.
        let csv = config.out.as_deref().expect("plot requires --out");
        table::write_plot(&outcome.table, config.command, csv)?;
    }
    match outcome.failure {
        Some(reason) => Err(CliError::Compute(reason)),
        None => Ok(()),
    }
}
