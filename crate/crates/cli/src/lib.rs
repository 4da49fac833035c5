//! Configuration, pipelines and artifact handling for the `heflow` binary.

pub mod artifacts;
pub mod bundled;
pub mod config;
pub mod error;
pub mod hegf;
pub mod manifest;
pub mod pipeline;
pub mod verify;

pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use pipeline::{run, RunSummary};
pub use verify::{verify, VerifyReport};
