use std::path::PathBuf;

use thiserror::Error;

use crate::graph::Expansion;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Parameters are individually valid but jointly describe no process.
    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("graph is disconnected")]
    Disconnected,

    /// The enumeration stopped at the cap; `partial` is the minimum over
    /// the sets visited so far and is only an upper bound on the true value.
    #[error("enumeration cap of {cap} sets exceeded")]
    EnumerationCapExceeded { cap: usize, partial: Box<Expansion> },

    #[error("no convergence after {iterations} iterations (best estimate {best})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("path from {from} to {to} has {len} edges, window needs {needed}")]
    PathTooShort {
        from: usize,
        to: usize,
        len: usize,
        needed: usize,
    },

    #[error("largest cluster has {largest} vertices, at least {required} required")]
    InsufficientCluster { largest: usize, required: usize },

    #[error("vertex {0} does not carry the requested symbol")]
    NotInSupport(usize),

    #[error("vertex {vertex} has no colour")]
    UndefinedColour { vertex: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
