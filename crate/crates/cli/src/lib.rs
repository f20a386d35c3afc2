//! Library side of the `apxgrp` experiment harness: configuration,
//! command implementations and report emission. The binary in `main.rs`
//! is a thin wrapper so the integration suites can drive everything
//! in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::CommandKind;
pub use config::ExperimentConfig;
pub use error::CliError;
