//! Command-line driver for the `coulomb-qed` crate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::process::ExitCode;

/// Failures that end a run, each with its exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<coulomb_qed::Error> for CliError {
    fn from(e: coulomb_qed::Error) -> Self {
        use coulomb_qed::Error::*;
        match e {
            Domain(m) | Config(m) => CliError::Config(m),
            Capability(m) => CliError::Capability(m),
            Internal(m) => CliError::Internal(m),
        }
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_CAPABILITY: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Capability(_) => EXIT_CAPABILITY,
            CliError::Internal(_) => EXIT_VERIFY_FAILED,
        })
    }
}
