use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{MacsError, Result};
use crate::metrics::MetricsReport;
use crate::model::{Instance, MaterializedSchedule, Schedule};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Serialize)]
struct InstanceOut<'a> {
    schema: u64,
    #[serde(flatten)]
    instance: &'a Instance,
}

/// Schedule file as written by `solve` and read by `evaluate` / `validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub schema: u64,
    pub schedule: Schedule,
    pub materialized: MaterializedSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
}

impl ScheduleFile {
    pub fn new(schedule: Schedule, materialized: MaterializedSchedule) -> Self {
        ScheduleFile {
            schema: SCHEMA_VERSION,
            schedule,
            materialized,
            feasible: None,
            objective: None,
            metrics: None,
        }
    }
}

fn parse_err(origin: &str, location: impl Into<String>, message: impl Into<String>) -> MacsError {
    MacsError::Parse {
        path: origin.to_string(),
        location: location.into(),
        message: message.into(),
    }
}

/// Parses JSON text, checks the schema tag, then decodes into `T`, naming the
/// offending field on failure.
fn decode<T: DeserializeOwned>(text: &str, origin: &str, strip_schema: bool) -> Result<T> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| {
        parse_err(origin, format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| parse_err(origin, "top level", "expected a JSON object"))?;
    let schema = obj
        .get("schema")
        .ok_or_else(|| parse_err(origin, "schema", "missing field `schema`"))?;
    let found = schema
        .as_u64()
        .ok_or_else(|| parse_err(origin, "schema", "expected an unsigned integer"))?;
    if found != SCHEMA_VERSION {
        return Err(MacsError::SchemaVersionMismatch {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    if strip_schema {
        obj.remove("schema");
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        parse_err(origin, format!("field `{path}`"), e.into_inner().to_string())
    })
}

pub fn instance_from_str(text: &str, origin: &str) -> Result<Instance> {
    let inst: Instance = decode(text, origin, true)?;
    inst.validate()?;
    Ok(inst)
}

pub fn instance_to_string(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceOut {
        schema: SCHEMA_VERSION,
        instance,
    })
    .expect("instance serializes");
    s.push('\n');
    s
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| MacsError::io(path, e))?;
    instance_from_str(&text, &path.display().to_string())
}

pub fn save_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_string(instance)).map_err(|e| MacsError::io(path, e))
}

pub fn schedule_from_str(text: &str, origin: &str) -> Result<ScheduleFile> {
    decode(text, origin, false)
}

pub fn schedule_to_string(file: &ScheduleFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("schedule serializes");
    s.push('\n');
    s
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<ScheduleFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| MacsError::io(path, e))?;
    schedule_from_str(&text, &path.display().to_string())
}

pub fn save_schedule(path: impl AsRef<Path>, file: &ScheduleFile) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, schedule_to_string(file)).map_err(|e| MacsError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::DailyWindow;

    const MINIMAL: &str = r#"{
        "schema": 1,
        "days": 1,
        "max_day_span_min": 240,
        "sessions": [{"id": "A", "kind": "paper", "duration_min": 120}],
        "attendees": [{"id": "a1", "utc_offset_min": 0}]
    }"#;

    #[test]
    fn minimal_instance_gets_defaults() {
        let inst = instance_from_str(MINIMAL, "mem").unwrap();
        assert_eq!(inst.delta, 1.0);
        assert_eq!(inst.omega, 0.8);
        assert_eq!(inst.slot_grid_min, 30);
        assert_eq!(inst.talk_slot_min, 22);
        assert_eq!(inst.mirrors, 2);
        assert_eq!(inst.attendees[0].comfort, DailyWindow::DEFAULT_COMFORT);
    }

    #[test]
    fn bad_field_is_named() {
        let text = MINIMAL.replace("\"duration_min\": 120", "\"duration_min\": \"long\"");
        let err = instance_from_str(&text, "mem").unwrap_err().to_string();
        assert!(err.contains("sessions[0].duration_min"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let text = MINIMAL.replace("\"days\": 1", "\"days\": 1, \"colour\": \"red\"");
        let err = instance_from_str(&text, "mem").unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn schema_is_checked() {
        let text = MINIMAL.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(
            instance_from_str(&text, "mem"),
            Err(MacsError::SchemaVersionMismatch { found: 2, .. })
        ));
        let text = MINIMAL.replace("\"schema\": 1,", "");
        assert!(instance_from_str(&text, "mem").is_err());
    }

    #[test]
    fn syntax_error_has_line() {
        let err = instance_from_str("{\n\"schema\": 1,,\n}", "mem").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn instance_round_trip() {
        let inst = instance_from_str(MINIMAL, "mem").unwrap();
        let back = instance_from_str(&instance_to_string(&inst), "mem").unwrap();
        assert_eq!(inst, back);
    }
}
