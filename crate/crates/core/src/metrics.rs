//! Satisfaction metrics of a materialized schedule.
//!
//! An attendee may follow each session in whichever mirror suits them best, so
//! the minutes credited for a session are the best overlap over all mirrors.
//! Speakers, by contrast, deliver their sessions live in every mirror and are
//! satisfied only if each of those deliveries fits their presentation window.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{MacsError, Result};
use crate::model::{Attendee, Instance, MaterializedSchedule, SpeakerProfile};
use crate::time::{window_contains, window_overlap, DailyWindow, TimeZoneOffset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttendeePresence {
    pub id: String,
    pub utc_offset_min: TimeZoneOffset,
    pub covered_min: i64,
    pub presence_ratio: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeakerStatus {
    pub attendee_id: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimezonePotential {
    pub utc_offset_min: TimeZoneOffset,
    pub attendees: usize,
    pub mean_potential_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub delta: f64,
    pub total_conference_min: i64,
    pub attendees: Vec<AttendeePresence>,
    pub satisfied_attendees: usize,
    pub attendance_ratio: f64,
    /// Σ covered minutes over attendees; exact numerator of the mean presence ratio.
    pub covered_min_sum: i64,
    pub mean_presence_ratio: f64,
    pub speakers: Vec<SpeakerStatus>,
    pub satisfied_speakers: usize,
    /// 1.0 when the instance has no speakers.
    pub speaker_presence_ratio: f64,
    pub non_overlap_violations: Vec<String>,
    pub per_timezone: Vec<TimezonePotential>,
}

/// Minutes of the conference `a` can follow inside their comfort window,
/// taking the best mirror for each session.
pub fn covered_minutes(a: &Attendee, ms: &MaterializedSchedule) -> i64 {
    covered_minutes_in(a.tz, &a.comfort, ms)
}

fn covered_minutes_in(tz: TimeZoneOffset, comfort: &DailyWindow, ms: &MaterializedSchedule) -> i64 {
    (0..ms.slots.len())
        .map(|i| {
            ms.mirrors
                .iter()
                .map(|m| window_overlap(&m.utc[i].to_local(tz), comfort))
                .max()
                .unwrap_or(0)
        })
        .sum()
}

pub fn presence_ratio(a: &Attendee, ms: &MaterializedSchedule) -> f64 {
    covered_minutes(a, ms) as f64 / ms.total_min() as f64
}

/// Satisfaction is non-strict: a ratio equal to the threshold satisfies it.
pub fn attendee_satisfied(ratio: f64, delta: f64) -> bool {
    ratio >= delta
}

pub(crate) fn covered_satisfies(covered: i64, total: i64, delta: f64) -> bool {
    attendee_satisfied(covered as f64 / total as f64, delta)
}

pub fn attendance_ratio(instance: &Instance, ms: &MaterializedSchedule, delta: f64) -> Result<f64> {
    if instance.attendees.is_empty() {
        return Err(MacsError::EmptyAttendeeSet);
    }
    let satisfied = instance
        .attendees
        .iter()
        .filter(|a| attendee_satisfied(presence_ratio(a, ms), delta))
        .count();
    Ok(satisfied as f64 / instance.attendees.len() as f64)
}

/// True when each of the speaker's sessions lies entirely inside their
/// presentation window in every mirror.
pub fn speaker_satisfied(instance: &Instance, sp: &SpeakerProfile, ms: &MaterializedSchedule) -> bool {
    let Some(speaker) = instance.attendee(&sp.attendee_id) else {
        return false;
    };
    sp.session_ids.iter().all(|sid| {
        let Some(i) = ms.slots.iter().position(|s| &s.session_id == sid) else {
            return false;
        };
        ms.mirrors
            .iter()
            .all(|m| window_contains(&m.utc[i].to_local(speaker.tz), &sp.presentation_window))
    })
}

pub fn speaker_presence_ratio(instance: &Instance, ms: &MaterializedSchedule) -> Result<f64> {
    if instance.speakers.is_empty() {
        return Err(MacsError::EmptySpeakerSet);
    }
    let satisfied = instance
        .speakers
        .iter()
        .filter(|sp| speaker_satisfied(instance, sp, ms))
        .count();
    Ok(satisfied as f64 / instance.speakers.len() as f64)
}

/// Mean potential conference minutes (presence ratio × total length) per time zone.
pub fn per_timezone_report(
    instance: &Instance,
    ms: &MaterializedSchedule,
) -> Result<BTreeMap<TimeZoneOffset, f64>> {
    if instance.attendees.is_empty() {
        return Err(MacsError::EmptyAttendeeSet);
    }
    let total = ms.total_min() as f64;
    let mut groups: BTreeMap<TimeZoneOffset, (f64, usize)> = BTreeMap::new();
    for a in &instance.attendees {
        let e = groups.entry(a.tz).or_default();
        e.0 += presence_ratio(a, ms) * total;
        e.1 += 1;
    }
    Ok(groups
        .into_iter()
        .map(|(tz, (sum, n))| (tz, sum / n as f64))
        .collect())
}

/// Full metrics report at satisfaction threshold `delta`.
pub fn report(instance: &Instance, ms: &MaterializedSchedule, delta: f64) -> Result<MetricsReport> {
    if instance.attendees.is_empty() {
        return Err(MacsError::EmptyAttendeeSet);
    }
    let total = ms.total_min();
    let attendees: Vec<AttendeePresence> = instance
        .attendees
        .iter()
        .map(|a| {
            let covered = covered_minutes(a, ms);
            let ratio = covered as f64 / total as f64;
            AttendeePresence {
                id: a.id.clone(),
                utc_offset_min: a.tz,
                covered_min: covered,
                presence_ratio: ratio,
                satisfied: attendee_satisfied(ratio, delta),
            }
        })
        .collect();
    let satisfied_attendees = attendees.iter().filter(|a| a.satisfied).count();
    let covered_min_sum: i64 = attendees.iter().map(|a| a.covered_min).sum();

    let speakers: Vec<SpeakerStatus> = instance
        .speakers
        .iter()
        .map(|sp| SpeakerStatus {
            attendee_id: sp.attendee_id.clone(),
            satisfied: speaker_satisfied(instance, sp, ms),
        })
        .collect();
    let satisfied_speakers = speakers.iter().filter(|s| s.satisfied).count();
    let speaker_presence_ratio = if speakers.is_empty() {
        1.0
    } else {
        satisfied_speakers as f64 / speakers.len() as f64
    };

    let per_timezone = {
        let mut groups: BTreeMap<TimeZoneOffset, (i64, usize)> = BTreeMap::new();
        for a in &attendees {
            let e = groups.entry(a.utc_offset_min).or_default();
            e.0 += a.covered_min;
            e.1 += 1;
        }
        groups
            .into_iter()
            .map(|(tz, (sum, n))| TimezonePotential {
                utc_offset_min: tz,
                attendees: n,
                mean_potential_min: sum as f64 / n as f64,
            })
            .collect()
    };

    let n = attendees.len();
    Ok(MetricsReport {
        delta,
        total_conference_min: total,
        satisfied_attendees,
        attendance_ratio: satisfied_attendees as f64 / n as f64,
        covered_min_sum,
        mean_presence_ratio: covered_min_sum as f64 / (n as f64 * total as f64),
        attendees,
        speakers,
        satisfied_speakers,
        speaker_presence_ratio,
        non_overlap_violations: crate::model::non_overlap_violations(instance, ms),
        per_timezone,
    })
}
