//! Verification reports for diagonal Hopf manifolds and the filtration engine.
//!
//! Every command returns an [`Outcome`]: a `key: value` report ending in a
//! `[summary]` block. Exit codes are 0 when all checks pass, 1 when a check
//! fails and 2 for unusable input.

pub mod commands;
pub mod config;
pub mod report;

use hopf_core::bundles::BundleError;
use hopf_core::manifold::ManifoldError;
use thiserror::Error;

pub use commands::{cmd_degree, cmd_filtration, cmd_series, cmd_verify, Outcome, RunConfig};
pub use config::parse_config;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("module file line {line}: {message}")]
    Module { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("{0}")]
    Core(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            // A starved sampler or a vanishing degree is a failed run, not bad input.
            Self::Manifold(ManifoldError::SamplerStarved { .. })
            | Self::Bundle(BundleError::NonPositiveDelta(_))
            | Self::Bundle(BundleError::DegenerateMetric(_))
            | Self::Core(_) => EXIT_FAIL,
            _ => EXIT_INPUT,
        }
    }
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}
