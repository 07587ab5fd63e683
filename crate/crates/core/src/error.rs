use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

/// Errors raised by the scheduling library.
#[derive(Debug, Error)]
pub enum MacsError {
    #[error("time zone offset {0} min is outside [-720, 840] or not a multiple of 15")]
    InvalidOffset(i32),

    #[error("invalid daily window [{start}, {end})")]
    InvalidWindow { start: u32, end: u32 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("sessions do not fit: {placed} of {total} sessions placed within {days} day(s) of {span_min} min")]
    CapacityExceeded {
        placed: usize,
        total: usize,
        days: u32,
        span_min: u32,
    },

    #[error("instance has no attendees")]
    EmptyAttendeeSet,

    #[error("instance has no speakers")]
    EmptySpeakerSet,

    #[error("no distinct tuple of {mirrors} anchors exists among the candidates")]
    SearchSpaceEmpty { mirrors: usize },

    #[error("search space of {size} evaluations exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u64 },

    #[error("schedule is invalid: {}", format_violations(.0))]
    InvalidSchedule(Vec<Violation>),

    #[error("histogram is empty or has zero total count")]
    EmptyHistogram,

    #[error("no sweep records to filter")]
    EmptyRecordSet,

    #[error("{path}: parse error at {location}: {message}")]
    Parse {
        path: String,
        location: String,
        message: String,
    },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl MacsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MacsError::Io {
            path: path.into(),
            source,
        }
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = MacsError> = std::result::Result<T, E>;
