use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use weightlab_core::varsolve::ScanRecord;

use crate::config::{Experiment, ResolvedConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub experiment: Experiment,
    /// SHA-256 of the resolved configuration.
    pub config_hash: String,
    pub code_version: String,
    /// Milliseconds since the Unix epoch.
    pub started_ms: u64,
    pub finished_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Row {
    pub index: usize,
    pub record: ScanRecord,
    /// Run facts that are not results, such as wall time.
    pub diagnostics: BTreeMap<String, f64>,
}

/// Two-column plot data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub name: String,
    pub x: String,
    pub y: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultSet {
    pub schema: String,
    pub metadata: Metadata,
    pub config: ResolvedConfig,
    pub rows: Vec<Row>,
    pub summary: BTreeMap<String, f64>,
    pub series: Vec<Series>,
}

impl ResultSet {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.record.error.is_some()).count()
    }

    /// First twelve hex digits of the config hash, used in file names.
    pub fn stem(&self) -> String {
        format!("{}-{}", self.metadata.experiment, &self.metadata.config_hash[..12])
    }
}
