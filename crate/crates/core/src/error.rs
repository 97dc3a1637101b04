use std::fmt;

/// Errors raised by the laboratory. Every variant names the offending
/// parameter so a front end can report which precondition was violated.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("size error: {param} = {value}, expected {expected}")]
    Size {
        param: &'static str,
        value: String,
        expected: String,
    },

    #[error("range error: {param} = {value} outside {allowed}")]
    Range {
        param: &'static str,
        value: String,
        allowed: String,
    },

    #[error("validation error: {param}: {reason}")]
    Validation { param: &'static str, reason: String },

    #[error("window error: N = {window} must be < J = {modulus} (the window would wrap around Z_J)")]
    Window { window: usize, modulus: usize },

    #[error("non-invertible: {system} cannot be iterated {steps} times (negative powers are undefined)")]
    NonInvertible { system: &'static str, steps: i64 },

    #[error("precondition error: {param} = {value}, requires {requirement}")]
    Precondition {
        param: &'static str,
        value: String,
        requirement: String,
    },

    #[error("length error: {param} has length {len}, need at least {needed}")]
    Length {
        param: &'static str,
        len: usize,
        needed: usize,
    },

    #[error("format error in {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            param,
            reason: reason.into(),
        }
    }

    pub(crate) fn range(param: &'static str, value: impl fmt::Display, allowed: impl Into<String>) -> Self {
        Error::Range {
            param,
            value: value.to_string(),
            allowed: allowed.into(),
        }
    }

    pub(crate) fn precondition(
        param: &'static str,
        value: impl fmt::Display,
        requirement: impl Into<String>,
    ) -> Self {
        Error::Precondition {
            param,
            value: value.to_string(),
            requirement: requirement.into(),
        }
    }

    /// The parameter the error is about, when there is one.
    pub fn param(&self) -> Option<&'static str> {
        match self {
            Error::Size { param, .. }
            | Error::Range { param, .. }
            | Error::Validation { param, .. }
            | Error::Precondition { param, .. }
            | Error::Length { param, .. } => Some(param),
            Error::Window { .. } => Some("N"),
            Error::NonInvertible { .. } => Some("n"),
            Error::Format { .. } | Error::Io(_) => None,
        }
    }
}
