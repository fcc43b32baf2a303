use std::fmt;

/// Exit status for each failure class.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Malformed invocation or configuration; names the failing field.
    Usage(String),
    Core(thue_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_domain() => EXIT_DOMAIN,
            CliError::Core(_) | CliError::Io(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<thue_core::Error> for CliError {
    fn from(e: thue_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(thue_core::Error::Internal(format!("json: {e}")))
    }
}
