//! File formats: instance and schedule JSON, registrant CSV, synthetic data,
//! iCalendar export and CSV reports.

mod ical;
mod json;
mod registrants;
mod reports;
mod synth;

pub use ical::{export_ical, render_ical};
pub use json::{
    instance_from_str, instance_to_string, load_instance, load_schedule, save_instance, save_schedule,
    schedule_from_str, schedule_to_string, ScheduleFile, SCHEMA_VERSION,
};
pub use registrants::{load_registrants_csv, parse_registrants_csv, write_registrants_csv};
pub use reports::{
    format_sweep_csv, format_timezone_csv, write_reports, COMFORT_CURVE_FILE, PRESENCE_FILE,
    SPEAKER_CURVE_FILE, SWEEP_FILE, TIMEZONE_FILE,
};
pub use synth::{
    conference_sessions, load_histogram, parse_histogram, sample_histogram, synth_registrants,
    synthetic_conference, TimezoneHistogram, SAMPLE_HISTOGRAM_CSV,
};
