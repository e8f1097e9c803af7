use std::fmt;

use sixj_screen::Error;

/// Why a command stopped, mapped onto the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: one or more named checks failed.
    Verification(Vec<String>),
    /// Exit 2: bad arguments or unusable input.
    Usage(String),
    /// Exit 3: a computation broke down.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        Failure::Usage(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Verification(names) => write!(f, "verification failed: {}", names.join(", ")),
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyScreen(..) | Error::Parity(_) | Error::OutOfRange { .. } | Error::Pattern(_) | Error::Invalid(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}
