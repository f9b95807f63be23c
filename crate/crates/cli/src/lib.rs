//! Command-line front end for `clickstat`: CSV and JSON formats, rayon
//! pipelines and the `simulate` / `analyze` / `report` subcommands.

pub mod cli;
pub mod counts_csv;
pub mod error;
pub mod pipeline;
pub mod report_json;
pub mod table;

pub use error::{CliError, Result};
