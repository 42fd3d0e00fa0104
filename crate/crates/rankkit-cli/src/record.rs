//! Deterministic JSON run records: every invocation can be replayed and
//! diffed from its record alone. Key order is fixed by declaration order,
//! and everything except the wall-clock durations is a pure function of
//! the command line.

use serde::Serialize;
use serde_json::Value;

use rankkit::Error;

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub flags: Value,
    pub inputs: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Value>,
    pub durations: Durations,
}

#[derive(Debug, Serialize)]
pub struct Durations {
    pub total_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub command: String,
    pub version: String,
    pub error: ErrorBody,
    pub exit_code: u8,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

pub fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Exit codes: 0 clean, 1 contract failure, 2 usage error, 3 resource or
/// budget exhaustion.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ContractViolation(_) => 1,
        Error::Domain(_) | Error::Config(_) => 2,
        Error::Resource(_) => 3,
    }
}

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain(_) => "domain",
        Error::ContractViolation(_) => "contract",
        Error::Config(_) => "config",
        Error::Resource(_) => "resource",
    }
}

pub fn error_record(command: &str, err: &Error) -> (ErrorRecord, u8) {
    let exit_code = exit_code_for(err);
    (
        ErrorRecord {
            command: command.to_string(),
            version: version(),
            error: ErrorBody { kind: error_kind(err).to_string(), message: err.to_string() },
            exit_code,
        },
        exit_code,
    )
}

pub fn usage_record(message: String) -> ErrorRecord {
    ErrorRecord {
        command: "rankkit".to_string(),
        version: version(),
        error: ErrorBody { kind: "usage".to_string(), message },
        exit_code: 2,
    }
}
