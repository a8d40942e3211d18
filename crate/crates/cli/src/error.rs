use fanin_core::Error;

pub const USAGE: u8 = 2;
pub const NUMERICAL: u8 = 3;
pub const CONSTRAINT: u8 = 4;
pub const DISAGREEMENT: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn constraint(message: impl Into<String>) -> Self {
        Self {
            code: CONSTRAINT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Integration { .. } | Error::SweepPoint { .. } | Error::NoThreshold { .. } => NUMERICAL,
            Error::ConstraintViolation { .. } => CONSTRAINT,
            _ => USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("i/o: {e}"))
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
