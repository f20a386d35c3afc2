//! CLI error wrapper with the documented exit codes.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(apxgrp::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<apxgrp::Error> for CliError {
    fn from(e: apxgrp::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    /// 2 = config/usage, 3 = resource budget, 4 = internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(apxgrp::Error::BudgetExceeded { .. }) => 3,
            CliError::Core(apxgrp::Error::Internal(_)) => 4,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(apxgrp::Error::BudgetExceeded { .. }) => "resource",
            CliError::Core(apxgrp::Error::Internal(_)) => "internal",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Core(_) => "usage",
        }
    }
}
