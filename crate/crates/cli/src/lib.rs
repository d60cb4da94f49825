//! Configuration parsing and experiment orchestration behind the `sfl` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, RawConfig};
pub use run::{run, Command, RunEntry, RunReport, Status};
