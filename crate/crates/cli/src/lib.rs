//! Command-line front end: configuration, subcommands and reports.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::run;
pub use config::{Cli, Command, ConfigError, RunConfig};
pub use report::{Check, Report, Status};
