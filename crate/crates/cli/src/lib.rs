//! Library surface of the `holonomy` command-line tool: scenario configs,
//! the runner, and report emitters. The binary in `main.rs` is a thin
//! wrapper so integration tests can drive everything in-process too.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, ConfigError, ScenarioConfig, ScenarioKind};
pub use report::{emit, Document, Format, RunOutcome, RunReport};
pub use run::run_scenario;
