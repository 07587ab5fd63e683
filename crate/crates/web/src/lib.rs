//! Browser bindings for the scheduler demo. Every export takes and returns
//! JSON text; the `*_json` functions hold the logic and run natively too.

use macs::io::{sample_histogram, synthetic_conference};
use macs::metrics::{attendance_ratio, per_timezone_report};
use macs::{materialize, solve, DailyWindow, Instance, MaterializedSchedule, Schedule, SessionKind, SolverConfig};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Demo parameters. The instance is rebuilt from these on every call, so the
/// page only has to keep the request and the schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoRequest {
    pub registrants: usize,
    pub seed: u64,
    pub mirrors: usize,
    pub comfort_width_min: u32,
    pub delta: f64,
    pub omega: f64,
    pub restarts: usize,
    pub moves: usize,
}

impl Default for DemoRequest {
    fn default() -> Self {
        DemoRequest {
            registrants: 355,
            seed: 1,
            mirrors: 2,
            comfort_width_min: 720,
            delta: 1.0,
            omega: 0.8,
            restarts: 2,
            moves: 400,
        }
    }
}

impl DemoRequest {
    fn instance(&self) -> Result<Instance, String> {
        let mut inst = synthetic_conference(&sample_histogram(), self.registrants, self.seed).map_err(err)?;
        let comfort = DailyWindow::from_start_width(480, self.comfort_width_min).map_err(err)?;
        for a in &mut inst.attendees {
            a.comfort = comfort;
        }
        inst.mirrors = self.mirrors;
        inst.delta = self.delta;
        inst.omega = self.omega;
        inst.validate().map_err(err)?;
        Ok(inst)
    }
}

#[derive(Debug, Serialize)]
struct SolveResponse {
    schedule: Schedule,
    materialized: MaterializedSchedule,
    /// Kind of each slot's session, aligned with `materialized.slots`.
    kinds: Vec<SessionKind>,
    anchor_labels: Vec<String>,
    feasible: bool,
    satisfied_attendees: usize,
    attendees: usize,
    attendance_ratio: f64,
    speaker_presence_ratio: f64,
}

/// Request plus a schedule previously returned by [`solve_json`].
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleQuery {
    request: DemoRequest,
    schedule: Schedule,
}

#[derive(Debug, Serialize, PartialEq)]
struct CurvePoint {
    comfort_width_min: u32,
    satisfied_attendees: usize,
    attendance_ratio: f64,
}

#[derive(Debug, Serialize, PartialEq)]
struct ZoneCoverage {
    utc_offset_min: i32,
    label: String,
    attendees: usize,
    mean_potential_min: f64,
    total_min: u64,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(err)
}

fn query(text: &str) -> Result<(Instance, Schedule), String> {
    let q: ScheduleQuery = serde_json::from_str(text).map_err(err)?;
    Ok((q.request.instance()?, q.schedule))
}

/// Solves the synthetic conference described by a [`DemoRequest`].
pub fn solve_json(request: &str) -> Result<String, String> {
    let req: DemoRequest = serde_json::from_str(request).map_err(err)?;
    let inst = req.instance()?;
    let config = SolverConfig {
        seed: req.seed,
        restarts: req.restarts,
        moves_per_restart: req.moves,
        ..SolverConfig::default()
    };
    let r = solve(&inst, &config).map_err(err)?;
    let materialized = materialize(&r.schedule, &inst).map_err(err)?;
    let index = inst.session_index();
    let kinds = materialized
        .slots
        .iter()
        .map(|s| inst.sessions[index[s.session_id.as_str()]].kind)
        .collect();
    to_json(&SolveResponse {
        kinds,
        anchor_labels: r.schedule.anchors.iter().map(|a| a.to_string()).collect(),
        materialized,
        feasible: r.feasible,
        satisfied_attendees: r.metrics.satisfied_attendees,
        attendees: inst.attendees.len(),
        attendance_ratio: r.metrics.attendance_ratio,
        speaker_presence_ratio: r.metrics.speaker_presence_ratio,
        schedule: r.schedule,
    })
}

/// Satisfied attendees for the given schedule as the comfort window widens
/// from 6 to 16 hours in half-hour steps, all starting at 08:00.
pub fn comfort_curve_json(query_text: &str) -> Result<String, String> {
    let (mut inst, schedule) = query(query_text)?;
    let ms = materialize(&schedule, &inst).map_err(err)?;
    let mut points = Vec::new();
    for width in (360..=960).step_by(30) {
        let w = DailyWindow::from_start_width(480, width).map_err(err)?;
        for a in &mut inst.attendees {
            a.comfort = w;
        }
        let ratio = attendance_ratio(&inst, &ms, inst.delta).map_err(err)?;
        points.push(CurvePoint {
            comfort_width_min: width,
            satisfied_attendees: (ratio * inst.attendees.len() as f64).round() as usize,
            attendance_ratio: ratio,
        });
    }
    to_json(&points)
}

/// Mean minutes of the program each time zone can follow inside its comfort
/// window, for the given schedule.
pub fn timezone_coverage_json(query_text: &str) -> Result<String, String> {
    let (inst, schedule) = query(query_text)?;
    let ms = materialize(&schedule, &inst).map_err(err)?;
    let per_tz = per_timezone_report(&inst, &ms).map_err(err)?;
    let total = inst.total_duration_min();
    let rows: Vec<ZoneCoverage> = per_tz
        .into_iter()
        .map(|(tz, mean)| ZoneCoverage {
            utc_offset_min: tz.minutes(),
            label: tz.to_string(),
            attendees: inst.attendees.iter().filter(|a| a.tz == tz).count(),
            mean_potential_min: mean,
            total_min: total,
        })
        .collect();
    to_json(&rows)
}

#[wasm_bindgen]
pub fn solve_demo(request: &str) -> Result<String, JsValue> {
    solve_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn comfort_curve(query: &str) -> Result<String, JsValue> {
    comfort_curve_json(query).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn timezone_coverage(query: &str) -> Result<String, JsValue> {
    timezone_coverage_json(query).map_err(|e| JsValue::from_str(&e))
}
