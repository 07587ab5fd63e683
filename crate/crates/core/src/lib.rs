//! Mirror-program conference scheduling.
//!
//! A conference program is replayed in several mirrors, each anchored to a
//! different time zone with an identical local-clock timetable. This crate
//! models attendees, speakers and sessions, measures how well a schedule
//! serves them, searches for good schedules and writes the results out as
//! JSON, CSV and iCalendar files.
//!
//! All times are integer minutes. Time zones are fixed UTC offsets.

pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod sweep;
pub mod time;

pub use error::{MacsError, Result};
pub use metrics::{MetricsReport, TimezonePotential};
pub use model::{
    materialize, validate, Attendee, Instance, MaterializedSchedule, Schedule, Session, SessionKind,
    SpeakerProfile, Violation,
};
pub use oracle::{enumerate_optimal, OracleConfig};
pub use solver::{evaluate, solve, SolveResult, SolverConfig};
pub use sweep::{pareto_front, run_sweep, SweepGrid, SweepRecord};
pub use time::{AbsInterval, DailyWindow, TimeZoneOffset};
