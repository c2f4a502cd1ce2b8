//! Library half of the `sgmres` command-line tool: Matrix Market IO,
//! history CSV rendering, run manifests, and the subcommand
//! implementations. The binary in `main.rs` is a thin wrapper that maps
//! errors to exit codes (0 success, 2 usage, 3 numerical).

use std::fmt;
use std::path::Path;

pub mod bench;
pub mod commands;
pub mod history;
pub mod manifest;
pub mod mm;

/// CLI-level error, split by the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable/unwritable files, malformed inputs → exit 2.
    Usage(String),
    /// Failures inside the numerical kernels → exit 3.
    Numerical(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Usage(format!("{}: {err}", path.display()))
    }

    pub fn parse(path: &Path, msg: &str) -> Self {
        CliError::Usage(format!("{}: {msg}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<singular_gmres::Error> for CliError {
    fn from(e: singular_gmres::Error) -> Self {
        match e {
            singular_gmres::Error::InvalidParameter(m) => CliError::Usage(m.to_string()),
            other => CliError::Numerical(format!("{other:?}")),
        }
    }
}
