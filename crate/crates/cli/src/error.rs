use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Failures surfaced to the shell, each with a fixed exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Config {
        field: Option<String>,
        message: String,
    },
    #[error("every run blew up: {0}")]
    AllBlowUp(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn io(path: &str, e: impl fmt::Display) -> Self {
        CliError::Io {
            path: path.into(),
            message: e.to_string(),
        }
    }

    pub fn config(field: Option<&str>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.map(str::to_string),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::AllBlowUp(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Runtime(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::AllBlowUp(_) => "blow_up",
            CliError::Io { .. } => "io",
            CliError::Runtime(_) => "runtime",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: &'a str,
            exit_code: i32,
            field: Option<&'a str>,
            path: Option<&'a str>,
            message: String,
        }
        let (field, path) = match self {
            CliError::Config { field, .. } => (field.as_deref(), None),
            CliError::Io { path, .. } => (None, Some(path.as_str())),
            _ => (None, None),
        };
        serde_json::to_string(&Record {
            error: self.kind(),
            exit_code: self.exit_code(),
            field,
            path,
            message: self.to_string(),
        })
        .expect("plain strings serialize")
    }
}

impl From<kdvlab::Error> for CliError {
    fn from(e: kdvlab::Error) -> Self {
        use kdvlab::Error as E;
        match e {
            E::InvalidParameter { name, .. } => CliError::config(Some(name), e.to_string()),
            E::InvalidGrid(_) => CliError::config(Some("n_modes"), e.to_string()),
            E::BlowUp { .. } => CliError::AllBlowUp(e.to_string()),
            E::Io(m) => CliError::Io {
                path: String::new(),
                message: m,
            },
            other => CliError::Runtime(other.to_string()),
        }
    }
}
