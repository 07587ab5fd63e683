//! Criteria sweeps and tradeoff filtering.
//!
//! Each grid point overrides the satisfaction threshold, speaker threshold,
//! talk length, mirror count and optionally the comfort and presentation
//! window widths, then re-solves from scratch.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{MacsError, Result};
use crate::model::Instance;
use crate::solver::{solve, SolverConfig};
use crate::time::{DailyWindow, TimeZoneOffset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub deltas: Vec<f64>,
    pub omegas: Vec<f64>,
    pub talk_slots_min: Vec<u32>,
    pub mirror_counts: Vec<usize>,
    #[serde(default)]
    pub comfort_widths_min: Option<Vec<u32>>,
    #[serde(default)]
    pub presentation_widths_min: Option<Vec<u32>>,
    /// Local start of overridden windows; 08:00 by default.
    #[serde(default = "default_window_start")]
    pub window_start_min: u32,
}

fn default_window_start() -> u32 {
    480
}

impl SweepGrid {
    /// Single-point grid at the instance's own parameters.
    pub fn at_defaults(instance: &Instance) -> Self {
        SweepGrid {
            deltas: vec![instance.delta],
            omegas: vec![instance.omega],
            talk_slots_min: vec![instance.talk_slot_min],
            mirror_counts: vec![instance.mirrors],
            comfort_widths_min: None,
            presentation_widths_min: None,
            window_start_min: default_window_start(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(MacsError::InvalidInstance(format!("sweep grid: {m}")));
        if self.deltas.is_empty()
            || self.omegas.is_empty()
            || self.talk_slots_min.is_empty()
            || self.mirror_counts.is_empty()
        {
            return bad("every axis needs at least one value");
        }
        if self
            .deltas
            .iter()
            .chain(&self.omegas)
            .any(|v| !(0.0..=1.0).contains(v))
        {
            return bad("thresholds must lie in [0, 1]");
        }
        if self.talk_slots_min.contains(&0) || self.mirror_counts.contains(&0) {
            return bad("talk slots and mirror counts must be positive");
        }
        for widths in [&self.comfort_widths_min, &self.presentation_widths_min]
            .into_iter()
            .flatten()
        {
            if widths.is_empty() || widths.iter().any(|&w| w == 0 || w > 1440) {
                return bad("window widths must lie in (0, 1440]");
            }
        }
        if self.window_start_min >= 1440 {
            return bad("window start must be a minute of the day");
        }
        Ok(())
    }

    /// Grid points in lexicographic order.
    pub fn points(&self) -> Vec<GridPoint> {
        fn sorted_f(v: &[f64]) -> Vec<f64> {
            let mut v = v.to_vec();
            v.sort_by(|a, b| a.total_cmp(b));
            v.dedup();
            v
        }
        fn sorted<T: Ord + Copy>(v: &[T]) -> Vec<T> {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        }
        let opt = |v: &Option<Vec<u32>>| match v {
            Some(v) => sorted(v).into_iter().map(Some).collect(),
            None => vec![None],
        };
        let comfort: Vec<Option<u32>> = opt(&self.comfort_widths_min);
        let presentation: Vec<Option<u32>> = opt(&self.presentation_widths_min);

        let mut out = Vec::new();
        for &delta in &sorted_f(&self.deltas) {
            for &omega in &sorted_f(&self.omegas) {
                for &talk_slot_min in &sorted(&self.talk_slots_min) {
                    for &mirrors in &sorted(&self.mirror_counts) {
                        for &comfort_width_min in &comfort {
                            for &presentation_width_min in &presentation {
                                out.push(GridPoint {
                                    delta,
                                    omega,
                                    talk_slot_min,
                                    mirrors,
                                    comfort_width_min,
                                    presentation_width_min,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub delta: f64,
    pub omega: f64,
    pub talk_slot_min: u32,
    pub mirrors: usize,
    pub comfort_width_min: Option<u32>,
    pub presentation_width_min: Option<u32>,
}

impl GridPoint {
    /// The instance with this point's overrides applied.
    pub fn apply(&self, instance: &Instance, window_start_min: u32) -> Result<Instance> {
        let mut inst = instance.clone();
        inst.delta = self.delta;
        inst.omega = self.omega;
        inst.talk_slot_min = self.talk_slot_min;
        inst.mirrors = self.mirrors;
        if let Some(w) = self.comfort_width_min {
            let window = DailyWindow::from_start_width(window_start_min, w)?;
            for a in &mut inst.attendees {
                a.comfort = window;
            }
        }
        if let Some(w) = self.presentation_width_min {
            let window = DailyWindow::from_start_width(window_start_min, w)?;
            for sp in &mut inst.speakers {
                sp.presentation_window = window;
            }
        }
        Ok(inst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRecord {
    pub point: GridPoint,
    pub satisfied_attendees: usize,
    pub attendance_ratio: f64,
    pub speaker_presence_ratio: f64,
    pub total_conference_min: i64,
    pub feasible: bool,
    pub anchors: Vec<TimeZoneOffset>,
    pub day_start_min: u32,
    /// Set when this grid point could not be solved; metrics are then zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(point: GridPoint, err: &MacsError) -> Self {
        SweepRecord {
            point,
            satisfied_attendees: 0,
            attendance_ratio: 0.0,
            speaker_presence_ratio: 0.0,
            total_conference_min: 0,
            feasible: false,
            anchors: Vec::new(),
            day_start_min: 0,
            error: Some(err.to_string()),
        }
    }
}

fn solve_point(instance: &Instance, grid: &SweepGrid, point: GridPoint, config: &SolverConfig) -> SweepRecord {
    let result = point
        .apply(instance, grid.window_start_min)
        .and_then(|inst| solve(&inst, config));
    match result {
        Ok(r) => SweepRecord {
            point,
            satisfied_attendees: r.metrics.satisfied_attendees,
            attendance_ratio: r.metrics.attendance_ratio,
            speaker_presence_ratio: r.metrics.speaker_presence_ratio,
            total_conference_min: r.metrics.total_conference_min,
            feasible: r.feasible,
            anchors: r.schedule.anchors,
            day_start_min: r.schedule.day_start_min,
            error: None,
        },
        Err(e) => SweepRecord::failed(point, &e),
    }
}

/// Solves every grid point. Failures at individual points, such as sessions
/// no longer fitting at a longer talk slot, are recorded per point.
pub fn run_sweep(instance: &Instance, grid: &SweepGrid, config: &SolverConfig) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    Ok(grid
        .points()
        .into_iter()
        .map(|p| solve_point(instance, grid, p, config))
        .collect())
}

fn axes(r: &SweepRecord) -> [f64; 4] {
    [
        r.satisfied_attendees as f64,
        r.point.delta,
        r.speaker_presence_ratio,
        r.point.talk_slot_min as f64,
    ]
}

/// True when `a` is at least as good as `b` on every axis and better on one.
pub fn dominates(a: &SweepRecord, b: &SweepRecord) -> bool {
    let (a, b) = (axes(a), axes(b));
    let mut strictly = false;
    for (x, y) in a.iter().zip(&b) {
        match x.total_cmp(y) {
            Ordering::Less => return false,
            Ordering::Greater => strictly = true,
            Ordering::Equal => {}
        }
    }
    strictly
}

/// Records not dominated on (satisfied attendees, Δ, achieved speaker ratio,
/// talk slot), in input order. Failed grid points are never on the front.
pub fn pareto_front(records: &[SweepRecord]) -> Result<Vec<SweepRecord>> {
    if records.is_empty() {
        return Err(MacsError::EmptyRecordSet);
    }
    let ok: Vec<&SweepRecord> = records.iter().filter(|r| r.error.is_none()).collect();
    Ok(ok
        .iter()
        .filter(|r| !ok.iter().any(|o| dominates(o, r)))
        .map(|r| (*r).clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(satisfied: usize, delta: f64, speaker: f64, talk: u32) -> SweepRecord {
        SweepRecord {
            point: GridPoint {
                delta,
                omega: 0.8,
                talk_slot_min: talk,
                mirrors: 2,
                comfort_width_min: None,
                presentation_width_min: None,
            },
            satisfied_attendees: satisfied,
            attendance_ratio: satisfied as f64 / 355.0,
            speaker_presence_ratio: speaker,
            total_conference_min: 1650,
            feasible: true,
            anchors: vec![],
            day_start_min: 480,
            error: None,
        }
    }

    #[test]
    fn front_of_one() {
        let r = vec![record(10, 1.0, 1.0, 22)];
        assert_eq!(pareto_front(&r).unwrap(), r);
        assert!(matches!(pareto_front(&[]), Err(MacsError::EmptyRecordSet)));
    }

    #[test]
    fn dominated_is_removed() {
        let good = record(300, 1.0, 1.0, 22);
        let bad = record(200, 0.5, 0.7, 13);
        let front = pareto_front(&[bad.clone(), good.clone()]).unwrap();
        assert_eq!(front, vec![good]);
    }

    #[test]
    fn satisfied_heavy_point_survives() {
        // more satisfied attendees bought with lower Δ, speaker ratio and talk length
        let orange = record(355, 0.5, 0.7, 13);
        let blue = record(217, 1.0, 0.8, 22);
        let front = pareto_front(&[blue.clone(), orange.clone()]).unwrap();
        assert_eq!(front, vec![blue, orange]);
    }

    #[test]
    fn failed_points_excluded() {
        let mut broken = record(400, 1.0, 1.0, 30);
        broken.error = Some("capacity".into());
        let fine = record(10, 1.0, 1.0, 22);
        assert_eq!(pareto_front(&[broken, fine.clone()]).unwrap(), vec![fine]);
    }

    #[test]
    fn points_are_lexicographic() {
        let grid = SweepGrid {
            deltas: vec![1.0, 0.5],
            omegas: vec![0.8],
            talk_slots_min: vec![22, 13],
            mirror_counts: vec![2],
            comfort_widths_min: Some(vec![600, 480]),
            presentation_widths_min: None,
            window_start_min: 480,
        };
        let pts = grid.points();
        assert_eq!(pts.len(), 8);
        assert_eq!((pts[0].delta, pts[0].talk_slot_min, pts[0].comfort_width_min), (0.5, 13, Some(480)));
        assert_eq!((pts[1].delta, pts[1].talk_slot_min, pts[1].comfort_width_min), (0.5, 13, Some(600)));
        assert_eq!((pts[7].delta, pts[7].talk_slot_min, pts[7].comfort_width_min), (1.0, 22, Some(600)));
    }
}
