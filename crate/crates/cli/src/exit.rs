use std::fmt;

use nccalc_core::NcError;

pub const CHECK_FAILED: i32 = 1;
pub const PARSE: i32 = 2;
pub const DOMAIN: i32 = 3;
pub const IO: i32 = 4;
pub const REFUSED: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(PARSE, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(IO, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<NcError> for CliError {
    fn from(e: NcError) -> Self {
        let code = match e {
            NcError::Syntax { .. } | NcError::UnknownVariable(_) | NcError::Arity { .. } => PARSE,
            NcError::MethodRefused(_) => REFUSED,
            NcError::Format(_) => IO,
            _ => DOMAIN,
        };
        CliError::new(code, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
