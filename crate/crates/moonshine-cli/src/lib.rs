//! Commands behind the `moonshine` binary.

pub mod commands;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Certificate(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Certificate(_) => 3,
            CliError::Data(_) => 4,
        }
    }
}

impl From<moonshine::rademacher::RademacherError> for CliError {
    fn from(e: moonshine::rademacher::RademacherError) -> Self {
        use moonshine::rademacher::RademacherError::*;
        match e {
            Certificate { .. } | Imaginary { .. } => CliError::Certificate(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<moonshine::chartab::ChartabError> for CliError {
    fn from(e: moonshine::chartab::ChartabError) -> Self {
        use moonshine::chartab::ChartabError::*;
        match e {
            NonIntegral { .. } | Negative { .. } => CliError::Certificate(e.to_string()),
            MissingCharacter(_) => CliError::Validation(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<moonshine::distrib::DistribError> for CliError {
    fn from(e: moonshine::distrib::DistribError) -> Self {
        CliError::Validation(e.to_string())
    }
}
