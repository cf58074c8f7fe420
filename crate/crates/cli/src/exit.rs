//! Exit codes: 0 success, 2 invalid spec, 3 numerical non-convergence, 4 I/O.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use fiid_perc::Error as LibError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    InvalidSpec,
    NonConvergence,
    Io,
}

impl Kind {
    pub fn code(self) -> u8 {
        match self {
            Kind::InvalidSpec => 2,
            Kind::NonConvergence => 3,
            Kind::Io => 4,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub msg: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Failure {}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            kind: Kind::Io,
            msg: format!("{}: {e}", path.display()),
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        kind: Kind::InvalidSpec,
        msg: msg.into(),
    }
}

pub fn no_convergence(msg: impl Into<String>) -> Failure {
    Failure {
        kind: Kind::NonConvergence,
        msg: msg.into(),
    }
}

fn classify_lib(e: &LibError) -> Kind {
    match e {
        LibError::NonConvergence { .. } | LibError::EnumerationCapExceeded { .. } => {
            Kind::NonConvergence
        }
        LibError::Io { .. } => Kind::Io,
        _ => Kind::InvalidSpec,
    }
}

/// Maps an error chain to a process exit code. Anything unrecognised is
/// treated as an invalid request.
pub fn code_for(err: &anyhow::Error) -> ExitCode {
    let kind = err
        .chain()
        .find_map(|e| {
            if let Some(f) = e.downcast_ref::<Failure>() {
                Some(f.kind)
            } else if let Some(l) = e.downcast_ref::<LibError>() {
                Some(classify_lib(l))
            } else {
                e.downcast_ref::<std::io::Error>().map(|_| Kind::Io)
            }
        })
        .unwrap_or(Kind::InvalidSpec);
    ExitCode::from(kind.code())
}
