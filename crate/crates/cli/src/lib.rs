//! Command-line front end: instance files, generators, solving,
//! verification, analysis checks and batch experiments.

pub mod commands;
pub mod error;
pub mod experiment;
pub mod instance_file;

pub use commands::{run, Cli, Outcome};
pub use error::{CliError, Result};
