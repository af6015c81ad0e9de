use std::fmt;

/// Errors surfaced to the shell, each with a fixed exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Unsupported(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Unsupported(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Unsupported(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<scatterbound::Error> for CliError {
    fn from(e: scatterbound::Error) -> Self {
        use scatterbound::Error as E;
        let msg = e.to_string();
        if e.is_numerical() {
            CliError::Numerical(msg)
        } else if matches!(e, E::InvalidParameter(_) | E::ParameterOutOfRange(_)) {
            CliError::Usage(msg)
        } else {
            CliError::Unsupported(msg)
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
