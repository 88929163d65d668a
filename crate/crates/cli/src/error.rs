use cvc::{CvcError, ParseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Fit(String),
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    /// 2 configuration, 3 data, 4 numerical failure, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Fit(_) => 4,
            CliError::Output(_) => 1,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::UnknownResponse(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<CvcError> for CliError {
    fn from(e: CvcError) -> Self {
        match e {
            CvcError::InvalidConfig(_) | CvcError::NoCompetitors => CliError::Config(e.to_string()),
            CvcError::Parse(p) => p.into(),
            CvcError::Degenerate(_) | CvcError::DimensionMismatch(_) => CliError::Data(e.to_string()),
            CvcError::Fit { .. } | CvcError::EmptyConfidenceSet => CliError::Fit(e.to_string()),
        }
    }
}
