//! Library surface of the CLI harness: config-file parsing, run
//! manifests, and the machine-readable report formats (CSV and the
//! sectioned key-value report). Kept as a library so the round-trip
//! parsers are reachable from integration tests and fuzz targets.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod report;

pub use config::{parse_config_str, ConfigError, FileConfig};
pub use manifest::RunManifest;
