//! Configuration, orchestration and file output for the `m2ch` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use config::RunConfig;
pub use error::CliError;
