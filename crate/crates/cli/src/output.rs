use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use crate::cli::Format;

/// Outcome class, mapped onto the process exit status.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotFound,
    Undecided,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::NotFound => EXIT_NOT_FOUND,
            Status::Undecided => EXIT_UNDECIDED,
        }
    }
}

pub struct Report {
    json: String,
    text: String,
    pub status: Status,
}

impl Report {
    pub fn new<T: Serialize>(value: &T, text: String, status: Status) -> Result<Self> {
        Ok(Report {
            json: serde_json::to_string(value)?,
            text,
            status,
        })
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => writeln!(out, "{}", self.json),
            Format::Text => writeln!(out, "{}", self.text),
        }
    }
}

/// Exit status for a failed command.
pub fn error_exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<boolcube::Error>() {
        Some(
            boolcube::Error::BudgetExceeded(_)
            | boolcube::Error::BadPrecision(_)
            | boolcube::Error::ThresholdNotMet(_),
        ) => EXIT_UNDECIDED,
        _ => EXIT_USAGE,
    }
}
