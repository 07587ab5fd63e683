//! Invariant checks shared by the property tests and the acceptance suite.

use macs::metrics::{self, covered_minutes};
use macs::model::{materialize, Schedule};
use macs::solver::anchor_tuples;
use macs::time::{window_overlap, AbsInterval, DailyWindow, MINUTES_PER_DAY};
use macs::{Instance, TimeZoneOffset};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::{shifted, small_instance, tz};

pub type Outcome = Result<(), TestCaseError>;

pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

pub fn window_strategy() -> impl Strategy<Value = DailyWindow> {
    prop_oneof![
        1 => Just(DailyWindow::FULL_DAY),
        9 => (0u32..1440, 1u32..1440).prop_map(|(s, w)| DailyWindow::from_start_width(s, w).unwrap()),
    ]
}

/// Minute-by-minute count of `iv` falling in `w`.
pub fn count_minutes(iv: &AbsInterval, w: &DailyWindow) -> i64 {
    let (s, e) = (w.start_min(), w.end_min());
    (iv.start_min..iv.end_min)
        .filter(|t| {
            let m = t.rem_euclid(MINUTES_PER_DAY) as u32;
            if w.is_full_day() {
                true
            } else if s < e {
                s <= m && m < e
            } else {
                m >= s || m < e
            }
        })
        .count() as i64
}

pub fn identity_schedule(inst: &Instance, anchors: Vec<TimeZoneOffset>, day_start: u32) -> Schedule {
    Schedule {
        anchors,
        day_start_min: day_start,
        order: inst.sessions.iter().map(|s| s.id.clone()).collect(),
    }
}

pub fn overlap_matches_minute_count(start: i64, len: i64, w: DailyWindow) -> Outcome {
    let iv = AbsInterval::new(start, start + len);
    prop_assert_eq!(window_overlap(&iv, &w), count_minutes(&iv, &w));
    Ok(())
}

pub fn overlap_is_additive(a: i64, l1: i64, l2: i64, w: DailyWindow) -> Outcome {
    let whole = window_overlap(&AbsInterval::new(a, a + l1 + l2), &w);
    let parts = window_overlap(&AbsInterval::new(a, a + l1), &w)
        + window_overlap(&AbsInterval::new(a + l1, a + l1 + l2), &w);
    prop_assert_eq!(whole, parts);
    Ok(())
}

pub fn metrics_translation_invariant(seed: u64, steps: i32, ds: u32) -> Outcome {
    let delta = steps * 15;
    let inst = small_instance(seed);
    let moved = shifted(&inst, delta);
    let anchors = anchor_tuples(&inst, 60).unwrap()[0].clone();
    let anchors_moved: Vec<TimeZoneOffset> = anchors.iter().map(|a| a.shifted(delta).unwrap()).collect();
    let ms_a = materialize(&identity_schedule(&inst, anchors, ds * 30), &inst).unwrap();
    let ms_b = materialize(&identity_schedule(&moved, anchors_moved, ds * 30), &moved).unwrap();
    let a = metrics::report(&inst, &ms_a, inst.delta).unwrap();
    let b = metrics::report(&moved, &ms_b, inst.delta).unwrap();
    prop_assert_eq!(a.covered_min_sum, b.covered_min_sum);
    prop_assert_eq!(a.satisfied_attendees, b.satisfied_attendees);
    prop_assert_eq!(a.attendance_ratio, b.attendance_ratio);
    prop_assert_eq!(a.speaker_presence_ratio, b.speaker_presence_ratio);
    prop_assert_eq!(a.non_overlap_violations, b.non_overlap_violations);
    let pa: Vec<f64> = a.per_timezone.iter().map(|t| t.mean_potential_min).collect();
    let pb: Vec<f64> = b.per_timezone.iter().map(|t| t.mean_potential_min).collect();
    prop_assert_eq!(pa, pb);
    Ok(())
}

fn one_and_two_mirrors(
    seed: u64,
    ds: u32,
    extra: i32,
) -> Option<(Instance, macs::MaterializedSchedule, macs::MaterializedSchedule)> {
    let mut inst = small_instance(seed);
    let base = tz(-480 + 60 * ((seed % 18) as i32));
    let other = tz(extra * 60);
    if base == other {
        return None;
    }
    inst.mirrors = 1;
    let one = materialize(&identity_schedule(&inst, vec![base], ds * 30), &inst).unwrap();
    inst.mirrors = 2;
    let two = materialize(&identity_schedule(&inst, vec![base, other], ds * 30), &inst).unwrap();
    Some((inst, one, two))
}

pub fn attendee_mirror_monotone(seed: u64, ds: u32, extra: i32) -> Outcome {
    let Some((inst, one, two)) = one_and_two_mirrors(seed, ds, extra) else {
        return Ok(());
    };
    for a in &inst.attendees {
        prop_assert!(covered_minutes(a, &two) >= covered_minutes(a, &one));
    }
    let d = inst.delta;
    prop_assert!(metrics::attendance_ratio(&inst, &two, d).unwrap() >= metrics::attendance_ratio(&inst, &one, d).unwrap());
    Ok(())
}

pub fn speaker_mirror_anti_monotone(seed: u64, ds: u32, extra: i32) -> Outcome {
    let Some((inst, one, two)) = one_and_two_mirrors(seed, ds, extra) else {
        return Ok(());
    };
    for sp in &inst.speakers {
        if metrics::speaker_satisfied(&inst, sp, &two) {
            prop_assert!(metrics::speaker_satisfied(&inst, sp, &one));
        }
    }
    Ok(())
}

pub fn attendance_non_increasing_in_delta(seed: u64, d1: f64, d2: f64) -> Outcome {
    let inst = small_instance(seed);
    let sched = identity_schedule(&inst, anchor_tuples(&inst, 60).unwrap()[0].clone(), 480);
    let ms = materialize(&sched, &inst).unwrap();
    let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
    prop_assert!(metrics::attendance_ratio(&inst, &ms, lo).unwrap() >= metrics::attendance_ratio(&inst, &ms, hi).unwrap());
    Ok(())
}
