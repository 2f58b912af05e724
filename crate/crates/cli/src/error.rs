use std::path::PathBuf;

use absagen::{CorpusError, DecodeBatchError, MetricsError, PolicyError, SerializeError, TaskError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Write { .. } => 2,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::UnknownDataset(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<TaskError> for CliError {
    fn from(e: TaskError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SerializeError> for CliError {
    fn from(e: SerializeError) -> Self {
        match e {
            SerializeError::Task(t) => t.into(),
            SerializeError::UnknownFormat(_) | SerializeError::UnknownMode(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Task(t) => t.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<DecodeBatchError> for CliError {
    fn from(e: DecodeBatchError) -> Self {
        CliError::Data(e.to_string())
    }
}
