//! Experiment runner for the `nomasec` analyses: config files, sweeps to CSV,
//! validation against simulation, and SVG plots.

pub mod config;
pub mod error;
pub mod svg;
pub mod sweep;
pub mod validate;

pub use config::{parse_config, parse_config_str, ConfigFile, Scenario, SweepKeys, Target};
pub use error::{CliError, CliResult};
pub use sweep::{run_sweep, SweepSpec};
