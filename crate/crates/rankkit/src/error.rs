//! Error taxonomy shared across the library.
//!
//! The four variants map one-to-one onto the CLI exit codes: domain and
//! configuration errors are caller mistakes, contract violations mean a
//! ranking/compression contract failed to hold, and resource errors mean a
//! scan bound, step budget, or horizon was exhausted before an answer was
//! reached.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The input is outside the operation's mathematical domain
    /// (e.g. asking for the 0th string when ranks are 1-based).
    #[error("domain error: {0}")]
    Domain(String),

    /// A declared contract (ranking, compression, injectivity, inverse,
    /// nongappiness, ...) failed on a concrete input.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The operation was invoked with an unusable configuration, such as a
    /// ranker of the wrong kind.
    #[error("configuration error: {0}")]
    Config(String),

    /// A scan limit, step budget, or horizon ran out before the operation
    /// could finish.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
