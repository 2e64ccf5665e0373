//! Command-line front end for the delayed confidence price model: config
//! parsing, CSV output and the `price`, `table`, `simulate` and `moments`
//! commands.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod tables;

pub use commands::Output;
pub use config::{Config, DayCount};
pub use error::{CliError, EXIT_CONFIG, EXIT_NUMERICAL};

/// Parses a head convention name, `shifted` or `dropped`.
pub fn approx_head(name: &str) -> Result<confidence_core::approx::HeadConvention, CliError> {
    use confidence_core::approx::HeadConvention;
    match name {
        "shifted" => Ok(HeadConvention::Shifted),
        "dropped" => Ok(HeadConvention::Dropped),
        _ => Err(CliError::config(format!("unknown head convention `{name}`"))),
    }
}
