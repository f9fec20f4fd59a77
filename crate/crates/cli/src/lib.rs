//! Library side of the `parpolar` command: configuration parsing and the
//! subcommand implementations, kept out of `main` so they can be tested.

pub mod commands;
pub mod config;
mod error;

pub use error::CliError;
