use std::fmt;

use serde::Serialize;

use crate::model::{IncidentNumber, ReportId, SubmissionId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One field-level validation failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldErrors(pub Vec<FieldError>);

impl fmt::Display for FieldErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", e.field, e.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("report {0} is already indexed")]
    DuplicateReport(ReportId),
    #[error("unknown report {0}")]
    UnknownReport(ReportId),
    #[error("a report with url {0} already exists")]
    DuplicateUrl(String),
    #[error("unknown incident {0}")]
    UnknownIncident(IncidentNumber),
    #[error("moving report {report} would leave incident {incident} without reports")]
    WouldOrphanIncident {
        report: ReportId,
        incident: IncidentNumber,
    },
    #[error("namespace {0} is already registered")]
    DuplicateNamespace(String),
    #[error("invalid name {name:?}: {reason}")]
    InvalidName { name: String, reason: &'static str },
    #[error("unknown namespace {0}")]
    UnknownNamespace(String),
    #[error("unknown tag {namespace}:{tag}")]
    UnknownTag { namespace: String, tag: String },
    #[error("incident {incident} is already classified as {namespace}:{tag}")]
    DuplicateClassification {
        incident: IncidentNumber,
        namespace: String,
        tag: String,
    },
    #[error("incident {incident} is not classified as {namespace}:{tag}")]
    UnknownClassification {
        incident: IncidentNumber,
        namespace: String,
        tag: String,
    },
    #[error("validation failed: {0}")]
    Validation(FieldErrors),
    #[error("unknown submission {0}")]
    UnknownSubmission(SubmissionId),
    #[error("submission {0} has already been decided")]
    AlreadyDecided(SubmissionId),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("unknown view {0}")]
    UnknownView(String),
    #[error("corrupt log at record {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
    #[error("storage error: {0}")]
    Storage(String),
}

impl Error {
    pub fn validation(field: &str, message: &str) -> Self {
        Error::Validation(FieldErrors(vec![FieldError::new(field, message)]))
    }

    /// Stable machine-readable name, shared by the HTTP API and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DuplicateReport(_) => "DuplicateReport",
            Error::UnknownReport(_) => "UnknownReport",
            Error::DuplicateUrl(_) => "DuplicateUrl",
            Error::UnknownIncident(_) => "UnknownIncident",
            Error::WouldOrphanIncident { .. } => "WouldOrphanIncident",
            Error::DuplicateNamespace(_) => "DuplicateNamespace",
            Error::InvalidName { .. } => "InvalidName",
            Error::UnknownNamespace(_) => "UnknownNamespace",
            Error::UnknownTag { .. } => "UnknownTag",
            Error::DuplicateClassification { .. } => "DuplicateClassification",
            Error::UnknownClassification { .. } => "UnknownClassification",
            Error::Validation(_) => "ValidationError",
            Error::UnknownSubmission(_) => "UnknownSubmission",
            Error::AlreadyDecided(_) => "AlreadyDecided",
            Error::InvalidQuery(_) => "InvalidQuery",
            Error::UnknownView(_) => "UnknownView",
            Error::CorruptLog { .. } => "CorruptLog",
            Error::Storage(_) => "StorageError",
        }
    }

    pub fn field_errors(&self) -> Option<&[FieldError]> {
        match self {
            Error::Validation(errors) => Some(&errors.0),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Storage(err.to_string())
    }
}
