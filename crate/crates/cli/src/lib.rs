//! Library side of the `ququart` command-line tool: configuration parsing,
//! the subcommand pipelines and deterministic table serialization.

pub mod commands;
pub mod config;
pub mod output;

pub use config::{ConfigError, RunConfig};
pub use output::{OutputFormat, Table, Value};
