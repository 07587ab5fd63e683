//! Exhaustive optimizer for small instances.
//!
//! Every session permutation is tried at every anchor tuple and day start, and
//! each candidate is scored through [`materialize`] and the full metrics
//! report rather than the solver's lookup tables, so the two paths are
//! independent.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{MacsError, Result};
use crate::metrics::{self, MetricsReport};
use crate::model::{materialize, Instance, Schedule};
use crate::solver::{anchor_tuples, is_feasible, penalized_score, preference, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Maximum number of (order × anchor tuple × day start) evaluations.
    pub cap: u64,
    pub anchor_stride_min: i32,
    /// Only used to report the objective of the optimum.
    pub penalty_weight: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cap: 10_000_000,
            anchor_stride_min: 60,
            penalty_weight: 10.0,
        }
    }
}

/// Number of evaluations an exhaustive search of `instance` needs.
pub fn search_space_size(instance: &Instance, stride_min: i32) -> Result<u128> {
    let perms: u128 = (1..=instance.sessions.len() as u128).product();
    let tuples = anchor_tuples(instance, stride_min)?.len() as u128;
    Ok(perms * tuples * instance.day_starts().len() as u128)
}

/// Rearranges `v` into the next permutation in lexicographic order.
/// Returns false after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

struct Best {
    feasible: bool,
    report: MetricsReport,
    order: Vec<usize>,
    pref: (u32, usize, u32),
    schedule: Schedule,
}

/// Feasibility first, then attendance, then total covered minutes, then the
/// lexicographically smaller order, then the solver's context preference.
fn beats(feasible: bool, r: &MetricsReport, order: &[usize], pref: (u32, usize, u32), b: &Best) -> bool {
    match feasible
        .cmp(&b.feasible)
        .then(r.attendance_ratio.total_cmp(&b.report.attendance_ratio))
        .then(r.covered_min_sum.cmp(&b.report.covered_min_sum))
    {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => (order, pref) < (b.order.as_slice(), b.pref),
    }
}

/// Maximizes attendance over every schedule meeting the speaker threshold
/// `omega` with no non-overlap violation. When none exists the best
/// schedule overall is returned with `feasible = false`.
pub fn enumerate_optimal(
    instance: &Instance,
    cfg: &OracleConfig,
    delta: f64,
    omega: f64,
) -> Result<SolveResult> {
    instance.validate()?;
    if instance.attendees.is_empty() {
        return Err(MacsError::EmptyAttendeeSet);
    }
    let size = search_space_size(instance, cfg.anchor_stride_min)?;
    if size > cfg.cap as u128 {
        return Err(MacsError::SearchSpaceTooLarge { size, cap: cfg.cap });
    }

    let tuples = anchor_tuples(instance, cfg.anchor_stride_min)?;
    let day_starts = instance.day_starts();
    let n = instance.sessions.len();
    let mut best: Option<Best> = None;

    for (t, anchors) in tuples.iter().enumerate() {
        for &day_start in &day_starts {
            let pref = preference(t, day_start);
            let mut order: Vec<usize> = (0..n).collect();
            loop {
                let schedule = Schedule {
                    anchors: anchors.clone(),
                    day_start_min: day_start,
                    order: order.iter().map(|&i| instance.sessions[i].id.clone()).collect(),
                };
                if let Ok(ms) = materialize(&schedule, instance) {
                    let report = metrics::report(instance, &ms, delta)?;
                    let feasible = is_feasible(&report, omega);
                    if best.as_ref().is_none_or(|b| beats(feasible, &report, &order, pref, b)) {
                        best = Some(Best {
                            feasible,
                            report,
                            order: order.clone(),
                            pref,
                            schedule,
                        });
                    }
                }
                if !next_permutation(&mut order) {
                    break;
                }
            }
        }
    }

    let best = best.ok_or(MacsError::CapacityExceeded {
        placed: 0,
        total: n,
        days: instance.days,
        span_min: instance.max_day_span_min,
    })?;
    let objective = penalized_score(
        best.report.attendance_ratio,
        best.report.speaker_presence_ratio,
        best.report.non_overlap_violations.len(),
        omega,
        cfg.penalty_weight,
    );
    Ok(SolveResult {
        schedule: best.schedule,
        metrics: best.report,
        feasible: best.feasible,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Attendee, Session, SessionKind, SpeakerProfile};
    use crate::time::{DailyWindow, TimeZoneOffset};

    fn tz(m: i32) -> TimeZoneOffset {
        TimeZoneOffset::new(m).unwrap()
    }

    #[test]
    fn permutations_in_lex_order() {
        let mut v = vec![0, 1, 2];
        let mut all = vec![v.clone()];
        while next_permutation(&mut v) {
            all.push(v.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    #[test]
    fn two_session_fixture() {
        let w = |s, e| DailyWindow::new(s, e).unwrap();
        let mut inst = Instance::new(
            vec![
                Session::fixed("A", SessionKind::Paper, 120).with_speakers(["s1"]),
                Session::fixed("B", SessionKind::Paper, 120),
            ],
            vec![
                Attendee::new("a1", tz(0), w(480, 720)),
                Attendee::new("s1", tz(0), w(480, 720)),
            ],
            vec![SpeakerProfile {
                attendee_id: "s1".into(),
                presentation_window: w(600, 1200),
                session_ids: vec!["A".into()],
            }],
            1,
            240,
        );
        inst.mirrors = 1;
        inst.anchor_candidates = vec![tz(0)];
        inst.day_start_candidates = Some(vec![480, 600]);
        let r = enumerate_optimal(&inst, &OracleConfig::default(), 1.0, 1.0).unwrap();
        assert_eq!(r.schedule.order, vec!["B", "A"]);
        assert_eq!(r.schedule.day_start_min, 480);
        assert_eq!(r.metrics.attendance_ratio, 1.0);
        assert!(r.feasible);
    }

    #[test]
    fn single_session_full_day() {
        let mut inst = Instance::new(
            vec![Session::fixed("only", SessionKind::Keynote, 60)],
            vec![Attendee::new("a", tz(330), DailyWindow::FULL_DAY)],
            vec![],
            1,
            60,
        );
        inst.mirrors = 1;
        inst.anchor_candidates = vec![tz(0), tz(60)];
        let r = enumerate_optimal(&inst, &OracleConfig::default(), 1.0, 0.8).unwrap();
        assert_eq!(r.metrics.attendance_ratio, 1.0);
        // every context ties; day start nearest 08:00 wins, then the earliest tuple
        assert_eq!(r.schedule.anchors, vec![tz(0)]);
        assert_eq!(r.schedule.day_start_min, 480);
    }

    #[test]
    fn eight_sessions_two_mirrors_exceed_cap() {
        let sessions = (0..8)
            .map(|i| Session::fixed(format!("s{i}"), SessionKind::Paper, 60))
            .collect();
        let mut inst = Instance::new(sessions, vec![Attendee::new("a", tz(0), DailyWindow::FULL_DAY)], vec![], 1, 600);
        // 24 hourly candidates, 48 half-hour day starts
        inst.anchor_candidates = (-11..=12).map(|h| tz(h * 60)).collect();
        inst.mirrors = 2;
        let size = search_space_size(&inst, 60).unwrap();
        assert_eq!(size, 40320 * 276 * 48);
        assert!(matches!(
            enumerate_optimal(&inst, &OracleConfig::default(), 1.0, 0.8),
            Err(MacsError::SearchSpaceTooLarge { .. })
        ));
    }
}
