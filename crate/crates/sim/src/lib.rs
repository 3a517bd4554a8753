//! Experiment harness for the `tot-core` retrieval model: JSON scenario
//! configs, parallel trial fan-out, summary statistics, CSV/JSON output and
//! the `tot` command-line entry points.

pub mod cli;
pub mod config;
pub mod output;
pub mod runner;
pub mod summary;

pub use config::{load_config, parse_config, LoadedConfig};
pub use runner::run_parallel;
pub use summary::{summarize, SummaryRow};
