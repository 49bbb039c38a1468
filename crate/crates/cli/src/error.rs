use std::path::Path;

use oprange::error::LRejection;
use oprange::Error;
use serde_json::{json, Map, Value};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for bad input or a violated precondition.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for an internal consistency failure.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn parse(path: &Path, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e {
                _ if e.is_internal() => "internal",
                Error::DimensionMismatch(_) => "dimension",
                Error::MixedMode(_) => "mixed_mode",
                Error::ExactModeUnsupported(_) => "mode_unsupported",
                Error::InvalidL(_) => "invalid_l",
                Error::IncompatibleL => "incompatible_l",
                Error::NotAlmostDominated => "not_almost_dominated",
                Error::InvalidInput(_) => "invalid_input",
                _ => "precondition",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_internal() => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        }
    }

    /// `{"error": {"kind": .., "message": .., ...}}`.
    pub fn to_json(&self) -> Value {
        let mut body = Map::new();
        body.insert("kind".into(), json!(self.kind()));
        body.insert("message".into(), json!(self.to_string()));
        match self {
            CliError::Parse { path, .. } | CliError::Io { path, .. } => {
                body.insert("path".into(), json!(path));
            }
            CliError::Core(Error::InvalidL(reason)) => {
                let tag = match reason {
                    LRejection::NotInDomainClosure => "not_in_domain_closure",
                    LRejection::MeetsDomain => "meets_domain",
                };
                body.insert("reason".into(), json!(tag));
            }
            _ => {}
        }
        json!({ "error": Value::Object(body) })
    }
}
