//! Monte Carlo runner, sweep harness and command-line front end for the
//! general random intersection graph. The closed forms, sampler and graph
//! analysis live in [`rig_core`].

pub mod cli;
pub mod experiments;
pub mod montecarlo;

use std::io;

/// Environment variable capping the number of trial workers.
pub const THREADS_ENV: &str = "RIG_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] rig_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for invalid input, 3 for enumeration-budget and
    /// regime errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        use rig_core::Error as Core;
        match self {
            Error::Core(Core::EnumerationBudget { .. } | Core::RegimeViolation { .. } | Core::Unachievable { .. }) => 3,
            Error::Core(_) | Error::Invalid(_) | Error::Config(_) => 2,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}

/// Worker count from `RIG_THREADS`, defaulting to the available parallelism.
/// Affects speed only.
pub fn worker_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
