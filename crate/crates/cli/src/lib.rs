//! Scenario runner for the collar gluing pipeline: parses TOML scenarios,
//! runs the declared checks and writes JSON and CSV reports.

pub mod catalogue;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod scenario;
pub mod shipped;

pub use error::{CliError, CliResult};
pub use pipeline::{run_checks, RunOutput, Selection};
pub use scenario::{Outcome, Scenario};
