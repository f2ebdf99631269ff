//! Command-line front end for `infopower`: JSON file formats and the
//! `validate`, `solve`, `duality` and `capacity` subcommands.

pub mod commands;
pub mod error;
pub mod files;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
