use serde::Serialize;
use weyl_lattice::Error;

pub const EXIT_SELFTEST: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

/// A failed job, reported as one JSON line on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub error: &'static str,
    pub exit_code: u8,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { error: "validation", exit_code: EXIT_VALIDATION, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self { error: "numeric", exit_code: EXIT_NUMERIC, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { error: "io", exit_code: EXIT_VALIDATION, message: message.into() }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::numeric(e.to_string())
        } else {
            Failure::validation(e.to_string())
        }
    }
}
