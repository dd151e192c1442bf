//! Command-line driver for the `kdivis` library.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
