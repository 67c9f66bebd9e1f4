//! Experiment driver: resolves configurations, runs parameter sweeps on a
//! worker pool, and writes result files.

pub mod config;
pub mod experiments;
pub mod output;
pub mod result;

use std::path::{Path, PathBuf};

pub use config::{Experiment, FileConfig, Overrides, ResolvedConfig};
pub use experiments::{plan, run, RowSpec};
pub use output::{emit, read_result_set, schema_document, Written};
pub use result::{ResultSet, Row, Series};

/// Version tag written into every output file.
pub const SCHEMA: &str = "weightlab-results/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parameter validation failed: {0}")]
    Hypothesis(#[from] weightlab_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
