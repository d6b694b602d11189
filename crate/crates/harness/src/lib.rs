//! Configuration, orchestration and result files for the `nlskdv` command.

pub mod config;
pub mod error;
pub mod manifest;
pub mod run;
pub mod table;

pub use config::{load_config, parse_config, RunConfig, Subcommand};
pub use error::{HarnessError, Result};
pub use manifest::RunStatus;
pub use run::{execute, run, Verdict};
pub use table::{write_results, Cell, ResultTable};
