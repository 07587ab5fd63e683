//! Attendees, speakers, sessions, problem instances and schedules.
//!
//! A [`Schedule`] fixes one anchor zone per mirror, the shared local start of
//! every conference day, and a single session order. Every mirror replays the
//! same local-clock timetable on its own anchor clock; [`materialize`] turns
//! this into concrete intervals.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MacsError, Result};
use crate::time::{AbsInterval, DailyWindow, TimeZoneOffset, MINUTES_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionKind {
    Paper,
    Keynote,
    Poster,
    Break,
    Social,
    Opening,
    Award,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Session {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub kind: SessionKind,
    /// Fixed length. Mutually exclusive with `num_talks`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_min: Option<u32>,
    /// Number of talks; the length is then derived from the instance's talk slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_talks: Option<u32>,
    #[serde(default)]
    pub speaker_ids: Vec<String>,
    #[serde(default)]
    pub non_overlap: bool,
}

impl Session {
    pub fn fixed(id: impl Into<String>, kind: SessionKind, duration_min: u32) -> Self {
        Session {
            id: id.into(),
            title: None,
            kind,
            duration_min: Some(duration_min),
            num_talks: None,
            speaker_ids: Vec::new(),
            non_overlap: false,
        }
    }

    pub fn talks(id: impl Into<String>, num_talks: u32) -> Self {
        Session {
            id: id.into(),
            title: None,
            kind: SessionKind::Paper,
            duration_min: None,
            num_talks: Some(num_talks),
            speaker_ids: Vec::new(),
            non_overlap: false,
        }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn with_speakers<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.speaker_ids = ids.into_iter().map(Into::into).collect();
        self
    }

    pub fn non_overlapping(mut self) -> Self {
        self.non_overlap = true;
        self
    }

    pub fn display_title(&self) -> &str {
        self.title.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attendee {
    pub id: String,
    #[serde(rename = "utc_offset_min")]
    pub tz: TimeZoneOffset,
    #[serde(default = "default_comfort")]
    pub comfort: DailyWindow,
}

fn default_comfort() -> DailyWindow {
    DailyWindow::DEFAULT_COMFORT
}

impl Attendee {
    pub fn new(id: impl Into<String>, tz: TimeZoneOffset, comfort: DailyWindow) -> Self {
        Attendee {
            id: id.into(),
            tz,
            comfort,
        }
    }
}

/// A speaker is an attendee with a presentation window and assigned sessions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeakerProfile {
    pub attendee_id: String,
    pub presentation_window: DailyWindow,
    pub session_ids: Vec<String>,
}

fn default_mirrors() -> usize {
    2
}
fn default_slot_grid() -> u32 {
    30
}
fn default_delta() -> f64 {
    1.0
}
fn default_omega() -> f64 {
    0.8
}
fn default_talk_slot() -> u32 {
    22
}
fn default_anchor_candidates() -> Vec<TimeZoneOffset> {
    TimeZoneOffset::grid(60)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub sessions: Vec<Session>,
    pub attendees: Vec<Attendee>,
    #[serde(default)]
    pub speakers: Vec<SpeakerProfile>,
    pub days: u32,
    pub max_day_span_min: u32,
    #[serde(default = "default_slot_grid")]
    pub slot_grid_min: u32,
    /// Restricts the searched day starts; every grid point of the day when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub day_start_candidates: Option<Vec<u32>>,
    #[serde(default = "default_anchor_candidates")]
    pub anchor_candidates: Vec<TimeZoneOffset>,
    #[serde(default = "default_mirrors")]
    pub mirrors: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "default_talk_slot")]
    pub talk_slot_min: u32,
    #[serde(default)]
    pub overhead_min: u32,
}

impl Instance {
    /// Instance with every tunable at its default.
    pub fn new(
        sessions: Vec<Session>,
        attendees: Vec<Attendee>,
        speakers: Vec<SpeakerProfile>,
        days: u32,
        max_day_span_min: u32,
    ) -> Self {
        Instance {
            sessions,
            attendees,
            speakers,
            days,
            max_day_span_min,
            slot_grid_min: default_slot_grid(),
            day_start_candidates: None,
            anchor_candidates: default_anchor_candidates(),
            mirrors: default_mirrors(),
            delta: default_delta(),
            omega: default_omega(),
            talk_slot_min: default_talk_slot(),
            overhead_min: 0,
        }
    }

    /// Length of a session. Talk-count sessions take
    /// `num_talks * talk_slot_min + overhead_min`, rounded up to the slot grid.
    pub fn session_duration(&self, session: &Session) -> u32 {
        match (session.duration_min, session.num_talks) {
            (Some(d), _) => d,
            (None, Some(n)) => {
                let raw = n * self.talk_slot_min + self.overhead_min;
                let g = self.slot_grid_min.max(1);
                raw.div_ceil(g) * g
            }
            (None, None) => 0,
        }
    }

    pub fn durations(&self) -> Vec<u32> {
        self.sessions
            .iter()
            .map(|s| self.session_duration(s))
            .collect()
    }

    pub fn total_duration_min(&self) -> u64 {
        self.durations().iter().map(|&d| d as u64).sum()
    }

    pub fn session_index(&self) -> HashMap<&str, usize> {
        self.sessions
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect()
    }

    pub fn attendee(&self, id: &str) -> Option<&Attendee> {
        self.attendees.iter().find(|a| a.id == id)
    }

    /// Day starts searched by the solver and oracle, ascending.
    pub fn day_starts(&self) -> Vec<u32> {
        match &self.day_start_candidates {
            Some(c) => {
                let mut c = c.clone();
                c.sort_unstable();
                c.dedup();
                c
            }
            None => (0..1440).step_by(self.slot_grid_min.max(1) as usize).collect(),
        }
    }

    /// Checks every structural invariant of the instance.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MacsError::InvalidInstance(msg));
        if self.sessions.is_empty() {
            return bad("no sessions".into());
        }
        if self.days == 0 || self.max_day_span_min == 0 {
            return bad("days and max_day_span_min must be positive".into());
        }
        if self.slot_grid_min == 0 || 1440 % self.slot_grid_min != 0 {
            return bad(format!(
                "slot_grid_min {} must divide 1440",
                self.slot_grid_min
            ));
        }
        if self.mirrors == 0 {
            return bad("mirrors must be at least 1".into());
        }
        if self.anchor_candidates.is_empty() {
            return bad("anchor_candidates is empty".into());
        }
        if !(0.0..=1.0).contains(&self.delta) || !(0.0..=1.0).contains(&self.omega) {
            return bad("delta and omega must lie in [0, 1]".into());
        }
        if let Some(c) = &self.day_start_candidates {
            if c.is_empty() {
                return bad("day_start_candidates is empty".into());
            }
            for &d in c {
                if d >= 1440 || d % self.slot_grid_min != 0 {
                    return bad(format!("day start {d} is not a grid point of the day"));
                }
            }
        }

        let mut ids = HashSet::new();
        for s in &self.sessions {
            if !ids.insert(s.id.as_str()) {
                return Err(MacsError::DuplicateId(s.id.clone()));
            }
            if s.duration_min.is_some() == s.num_talks.is_some() {
                return bad(format!(
                    "session `{}` needs exactly one of duration_min and num_talks",
                    s.id
                ));
            }
            let d = self.session_duration(s);
            if d == 0 {
                return bad(format!("session `{}` has zero length", s.id));
            }
            if !d.is_multiple_of(self.slot_grid_min) {
                return bad(format!(
                    "session `{}` length {d} is not a multiple of the {}-minute grid",
                    s.id, self.slot_grid_min
                ));
            }
            if d > self.max_day_span_min {
                return bad(format!(
                    "session `{}` length {d} exceeds the day span {}",
                    s.id, self.max_day_span_min
                ));
            }
        }

        let mut attendee_ids = HashSet::new();
        for a in &self.attendees {
            if !attendee_ids.insert(a.id.as_str()) {
                return Err(MacsError::DuplicateId(a.id.clone()));
            }
        }

        let index = self.session_index();
        let mut speaker_ids = HashSet::new();
        for sp in &self.speakers {
            if !speaker_ids.insert(sp.attendee_id.as_str()) {
                return Err(MacsError::DuplicateId(sp.attendee_id.clone()));
            }
            if !attendee_ids.contains(sp.attendee_id.as_str()) {
                return bad(format!("speaker `{}` is not an attendee", sp.attendee_id));
            }
            if sp.session_ids.is_empty() {
                return bad(format!("speaker `{}` has no sessions", sp.attendee_id));
            }
            for sid in &sp.session_ids {
                let Some(&i) = index.get(sid.as_str()) else {
                    return bad(format!(
                        "speaker `{}` references unknown session `{sid}`",
                        sp.attendee_id
                    ));
                };
                if !self.sessions[i].speaker_ids.contains(&sp.attendee_id) {
                    return bad(format!(
                        "session `{sid}` does not list speaker `{}`",
                        sp.attendee_id
                    ));
                }
            }
        }

        let capacity = self.days as u64 * self.max_day_span_min as u64;
        if self.total_duration_min() > capacity {
            return Err(MacsError::CapacityExceeded {
                placed: 0,
                total: self.sessions.len(),
                days: self.days,
                span_min: self.max_day_span_min,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub anchors: Vec<TimeZoneOffset>,
    pub day_start_min: u32,
    pub order: Vec<String>,
}

/// One session placed on the shared local clock.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub session_id: String,
    pub title: String,
    pub day: u32,
    /// Interval on the anchor clock, identical for every mirror.
    pub local: AbsInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorTimetable {
    pub anchor: TimeZoneOffset,
    /// UTC intervals, parallel to [`MaterializedSchedule::slots`].
    pub utc: Vec<AbsInterval>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterializedSchedule {
    pub day_start_min: u32,
    pub slots: Vec<Slot>,
    pub mirrors: Vec<MirrorTimetable>,
}

impl MaterializedSchedule {
    pub fn total_min(&self) -> i64 {
        self.slots.iter().map(|s| s.local.len()).sum()
    }

    pub fn num_mirrors(&self) -> usize {
        self.mirrors.len()
    }
}

/// Packs sessions of the given lengths day by day from `day_start`, moving to
/// the next day whenever the running span would exceed `span`. Returns local
/// start minutes, or the number of sessions that fit before capacity ran out.
pub fn pack_starts(
    durations: impl IntoIterator<Item = u32>,
    day_start: u32,
    days: u32,
    span: u32,
    out: &mut Vec<i64>,
) -> std::result::Result<(), usize> {
    out.clear();
    let mut day = 0u32;
    let mut used = 0u32;
    for d in durations {
        if used + d > span {
            day += 1;
            used = 0;
        }
        if day >= days || d > span {
            return Err(out.len());
        }
        out.push(day as i64 * MINUTES_PER_DAY + day_start as i64 + used as i64);
        used += d;
    }
    Ok(())
}

/// Places every session of `schedule` on the local clock and in UTC for each mirror.
pub fn materialize(schedule: &Schedule, instance: &Instance) -> Result<MaterializedSchedule> {
    let index = instance.session_index();
    let sessions: Vec<&Session> = schedule
        .order
        .iter()
        .map(|id| {
            index
                .get(id.as_str())
                .map(|&i| &instance.sessions[i])
                .ok_or_else(|| MacsError::InvalidSchedule(vec![Violation::NotAPermutation]))
        })
        .collect::<Result<_>>()?;
    let durations: Vec<u32> = sessions.iter().map(|s| instance.session_duration(s)).collect();

    let mut starts = Vec::with_capacity(durations.len());
    pack_starts(
        durations.iter().copied(),
        schedule.day_start_min,
        instance.days,
        instance.max_day_span_min,
        &mut starts,
    )
    .map_err(|placed| MacsError::CapacityExceeded {
        placed,
        total: durations.len(),
        days: instance.days,
        span_min: instance.max_day_span_min,
    })?;

    let slots: Vec<Slot> = sessions
        .iter()
        .zip(&starts)
        .zip(&durations)
        .map(|((s, &start), &d)| Slot {
            session_id: s.id.clone(),
            title: s.display_title().to_string(),
            day: (start / MINUTES_PER_DAY) as u32,
            local: AbsInterval::new(start, start + d as i64),
        })
        .collect();

    let mirrors = schedule
        .anchors
        .iter()
        .map(|&anchor| MirrorTimetable {
            anchor,
            utc: slots
                .iter()
                .map(|s| s.local.shifted(-(anchor.minutes() as i64)))
                .collect(),
        })
        .collect();

    Ok(MaterializedSchedule {
        day_start_min: schedule.day_start_min,
        slots,
        mirrors,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NotAPermutation,
    WrongAnchorCount { expected: usize, found: usize },
    DuplicateAnchor(TimeZoneOffset),
    DayStartOffGrid(u32),
    CapacityExceeded,
    NonOverlapViolated(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotAPermutation => write!(f, "order is not a permutation of the sessions"),
            Violation::WrongAnchorCount { expected, found } => {
                write!(f, "expected {expected} anchors, found {found}")
            }
            Violation::DuplicateAnchor(tz) => write!(f, "anchor {tz} appears more than once"),
            Violation::DayStartOffGrid(d) => write!(f, "day start {d} is not on the slot grid"),
            Violation::CapacityExceeded => write!(f, "sessions exceed the available days"),
            Violation::NonOverlapViolated(id) => {
                write!(f, "non-overlapping session `{id}` overlaps another mirror")
            }
        }
    }
}

/// Ids of non-overlapping sessions whose interval in some mirror intersects
/// a different session's interval in another mirror, in slot order.
pub fn non_overlap_violations(instance: &Instance, ms: &MaterializedSchedule) -> Vec<String> {
    let index = instance.session_index();
    let mut out = Vec::new();
    for (i, slot) in ms.slots.iter().enumerate() {
        let flagged = index
            .get(slot.session_id.as_str())
            .is_some_and(|&k| instance.sessions[k].non_overlap);
        if !flagged {
            continue;
        }
        let hit = ms.mirrors.iter().enumerate().any(|(m, mt)| {
            ms.mirrors.iter().enumerate().any(|(m2, other)| {
                m2 != m
                    && other
                        .utc
                        .iter()
                        .enumerate()
                        .any(|(j, iv)| j != i && iv.intersects(&mt.utc[i]))
            })
        });
        if hit {
            out.push(slot.session_id.clone());
        }
    }
    out
}

/// All rule violations of `schedule` against `instance`; empty when valid.
pub fn validate(schedule: &Schedule, instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();

    let index = instance.session_index();
    let mut seen = HashSet::new();
    let permutation = schedule.order.len() == instance.sessions.len()
        && schedule
            .order
            .iter()
            .all(|id| index.contains_key(id.as_str()) && seen.insert(id.as_str()));
    if !permutation {
        out.push(Violation::NotAPermutation);
    }

    if schedule.anchors.len() != instance.mirrors {
        out.push(Violation::WrongAnchorCount {
            expected: instance.mirrors,
            found: schedule.anchors.len(),
        });
    }
    let mut anchors = HashSet::new();
    for a in &schedule.anchors {
        if !anchors.insert(*a) {
            out.push(Violation::DuplicateAnchor(*a));
        }
    }

    let grid = instance.slot_grid_min.max(1);
    if schedule.day_start_min >= 1440 || !schedule.day_start_min.is_multiple_of(grid) {
        out.push(Violation::DayStartOffGrid(schedule.day_start_min));
    }

    if permutation {
        match materialize(schedule, instance) {
            Ok(ms) => out.extend(
                non_overlap_violations(instance, &ms)
                    .into_iter()
                    .map(Violation::NonOverlapViolated),
            ),
            Err(_) => out.push(Violation::CapacityExceeded),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tz(m: i32) -> TimeZoneOffset {
        TimeZoneOffset::new(m).unwrap()
    }

    fn two_sessions(anchor: i32) -> (Instance, Schedule) {
        let inst = Instance {
            mirrors: 1,
            anchor_candidates: vec![tz(anchor)],
            ..Instance::new(
                vec![
                    Session::fixed("A", SessionKind::Paper, 120),
                    Session::fixed("B", SessionKind::Paper, 120),
                ],
                vec![Attendee::new("a1", tz(0), DailyWindow::DEFAULT_COMFORT)],
                vec![],
                1,
                600,
            )
        };
        let sched = Schedule {
            anchors: vec![tz(anchor)],
            day_start_min: 480,
            order: vec!["A".into(), "B".into()],
        };
        (inst, sched)
    }

    #[test]
    fn materialize_packs_sequentially() {
        let (inst, sched) = two_sessions(0);
        let ms = materialize(&sched, &inst).unwrap();
        assert_eq!(ms.mirrors[0].utc, vec![AbsInterval::new(480, 600), AbsInterval::new(600, 720)]);
    }

    #[test]
    fn materialize_subtracts_anchor() {
        let (inst, sched) = two_sessions(-480);
        let ms = materialize(&sched, &inst).unwrap();
        assert_eq!(
            ms.mirrors[0].utc,
            vec![AbsInterval::new(960, 1080), AbsInterval::new(1080, 1200)]
        );
    }

    #[test]
    fn materialize_rolls_over_days() {
        let mut inst = Instance::new(
            vec![
                Session::fixed("A", SessionKind::Paper, 300),
                Session::fixed("B", SessionKind::Paper, 300),
                Session::fixed("C", SessionKind::Paper, 300),
            ],
            vec![],
            vec![],
            2,
            600,
        );
        inst.mirrors = 1;
        let sched = Schedule {
            anchors: vec![tz(0)],
            day_start_min: 480,
            order: vec!["A".into(), "B".into(), "C".into()],
        };
        let ms = materialize(&sched, &inst).unwrap();
        assert_eq!(ms.slots[2].day, 1);
        assert_eq!(ms.slots[2].local, AbsInterval::new(1440 + 480, 1440 + 780));

        inst.days = 1;
        assert!(matches!(
            materialize(&sched, &inst),
            Err(MacsError::CapacityExceeded { placed: 2, .. })
        ));
    }

    #[test]
    fn derived_duration_rounds_to_grid() {
        let inst = Instance::new(vec![Session::talks("P", 4), Session::talks("Q", 5)], vec![], vec![], 1, 600);
        assert_eq!(inst.session_duration(&inst.sessions[0]), 90);
        assert_eq!(inst.session_duration(&inst.sessions[1]), 120);
        let inst = Instance {
            talk_slot_min: 13,
            ..inst
        };
        assert_eq!(inst.session_duration(&inst.sessions[0]), 60);
    }

    #[test]
    fn validate_accepts_well_formed() {
        let (mut inst, mut sched) = two_sessions(0);
        inst.mirrors = 2;
        sched.anchors = vec![tz(60), tz(-420)];
        assert!(validate(&sched, &inst).is_empty());
    }

    #[test]
    fn validate_reports_structure() {
        let (inst, mut sched) = two_sessions(0);
        sched.order.pop();
        assert_eq!(validate(&sched, &inst), vec![Violation::NotAPermutation]);

        let (inst, mut sched) = two_sessions(0);
        sched.order[1] = "A".into();
        assert_eq!(validate(&sched, &inst), vec![Violation::NotAPermutation]);

        let (mut inst, mut sched) = two_sessions(0);
        inst.mirrors = 2;
        sched.anchors = vec![tz(0), tz(0)];
        assert_eq!(validate(&sched, &inst), vec![Violation::DuplicateAnchor(tz(0))]);

        let (inst, mut sched) = two_sessions(0);
        sched.day_start_min = 485;
        assert_eq!(validate(&sched, &inst), vec![Violation::DayStartOffGrid(485)]);
    }

    #[test]
    fn validate_non_overlap() {
        // keynote local [480,600); mirror -480 shows it at UTC [960,1080), where
        // mirror +0 runs the session at local [960,1080)
        let mut sessions = vec![Session::fixed("keynote", SessionKind::Keynote, 120).non_overlapping()];
        for i in 0..4 {
            sessions.push(Session::fixed(format!("s{i}"), SessionKind::Paper, 120));
        }
        let mut inst = Instance::new(sessions, vec![], vec![], 1, 600);
        inst.mirrors = 2;
        let sched = Schedule {
            anchors: vec![tz(0), tz(-480)],
            day_start_min: 480,
            order: vec!["keynote".into(), "s0".into(), "s1".into(), "s2".into(), "s3".into()],
        };
        let ms = materialize(&sched, &inst).unwrap();
        assert_eq!(ms.mirrors[0].utc[3], AbsInterval::new(840, 960));
        assert_eq!(
            validate(&sched, &inst),
            vec![Violation::NonOverlapViolated("keynote".into())]
        );

        // moved to the end of the day it overlaps nothing in the other mirror
        let mut inst2 = inst.clone();
        inst2.sessions[0].duration_min = Some(60);
        let sched = Schedule {
            anchors: vec![tz(0), tz(-720)],
            day_start_min: 480,
            order: vec!["s0".into(), "keynote".into(), "s1".into(), "s2".into(), "s3".into()],
        };
        assert!(validate(&sched, &inst2).is_empty());
    }

    #[test]
    fn instance_validation_errors() {
        let (mut inst, _) = two_sessions(0);
        inst.sessions[1].id = "A".into();
        assert!(matches!(inst.validate(), Err(MacsError::DuplicateId(_))));

        let (mut inst, _) = two_sessions(0);
        inst.sessions[0].duration_min = Some(100);
        assert!(inst.validate().is_err());

        let (mut inst, _) = two_sessions(0);
        inst.max_day_span_min = 200;
        assert!(inst.validate().is_err());

        let (mut inst, _) = two_sessions(0);
        inst.speakers.push(SpeakerProfile {
            attendee_id: "a1".into(),
            presentation_window: DailyWindow::FULL_DAY,
            session_ids: vec!["A".into()],
        });
        assert!(inst.validate().is_err(), "session A does not list a1");
        inst.sessions[0].speaker_ids.push("a1".into());
        inst.validate().unwrap();
    }
}
