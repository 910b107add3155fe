//! Library side of the `hetocc` command: configuration and the mode runners.

pub mod config;
mod error;
mod run;

pub use config::{parse_config, DataPaths, ExperimentKind, Mode, Overrides, RunConfig, SynthKind};
pub use error::{CliError, CliResult};
pub use run::{error_summary, run};
