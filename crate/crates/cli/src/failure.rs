use std::fmt;
use std::process::ExitCode;

/// A command failure, carrying the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation: missing or conflicting options. Exit 1.
    Usage(String),
    /// Unreadable or invalid input, or a document that could not be
    /// processed. Exit 2.
    Data(String),
    /// The remote classifier could not be used. Exit 3.
    Remote(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Remote(_) => 3,
        })
    }

    pub fn data(e: impl fmt::Display) -> Self {
        Failure::Data(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Remote(m) => f.write_str(m),
        }
    }
}

pub fn io_failure(what: &str, path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::Data(format!("cannot {what} {}: {e}", path.display()))
}
