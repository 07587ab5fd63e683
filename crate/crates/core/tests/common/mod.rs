#![allow(dead_code)]

pub mod props;

use macs::model::pack_starts;
use macs::{Attendee, DailyWindow, Instance, Session, SessionKind, SpeakerProfile, TimeZoneOffset};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn tz(m: i32) -> TimeZoneOffset {
    TimeZoneOffset::new(m).unwrap()
}

pub fn window(rng: &mut ChaCha8Rng, widths: &[u32]) -> DailyWindow {
    let w = *widths.choose(rng).unwrap();
    if w >= 1440 {
        return DailyWindow::FULL_DAY;
    }
    DailyWindow::from_start_width(rng.random_range(0..48) * 30, w).unwrap()
}

/// Small random instance: at most five sessions, a handful of attendees and
/// speakers, one or two mirrors over three or four hourly anchor candidates
/// and four to eight day-start slots.
pub fn small_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=5);
    let mirrors = rng.random_range(1..=2);
    let mut sessions: Vec<Session> = (0..n)
        .map(|i| {
            let d = *[30, 60, 90, 120].choose(&mut rng).unwrap();
            let mut s = Session::fixed(format!("s{i}"), SessionKind::Paper, d);
            if mirrors == 2 && rng.random_bool(0.15) {
                s = s.non_overlapping();
            }
            s
        })
        .collect();

    let attendees: Vec<Attendee> = (0..rng.random_range(1..=8))
        .map(|i| {
            let zone = rng.random_range(-8..=9) * 60;
            Attendee::new(format!("a{i}"), tz(zone), window(&mut rng, &[240, 360, 480, 600, 720, 900, 1440]))
        })
        .collect();

    let mut speakers = Vec::new();
    let mut ids: Vec<usize> = (0..attendees.len()).collect();
    ids.shuffle(&mut rng);
    for &a in ids.iter().take(rng.random_range(0..=2)) {
        let k = rng.random_range(0..n);
        sessions[k].speaker_ids.push(attendees[a].id.clone());
        speakers.push(SpeakerProfile {
            attendee_id: attendees[a].id.clone(),
            presentation_window: window(&mut rng, &[360, 540, 720, 900]),
            session_ids: vec![sessions[k].id.clone()],
        });
    }

    let total: u32 = sessions.iter().map(|s| s.duration_min.unwrap()).sum();
    let longest = sessions.iter().map(|s| s.duration_min.unwrap()).max().unwrap();
    let days = rng.random_range(1..=2u32);
    let even = total.div_ceil(days).div_ceil(30) * 30;
    let mut span = even.max(longest) + 30 * rng.random_range(0..=2);
    // the identity order must fit so every instance has a valid schedule
    let durations: Vec<u32> = sessions.iter().map(|s| s.duration_min.unwrap()).collect();
    while pack_starts(durations.iter().copied(), 0, days, span, &mut Vec::new()).is_err() {
        span += 30;
    }

    let mut inst = Instance::new(sessions, attendees, speakers, days, span);
    inst.mirrors = mirrors;
    let mut cands: Vec<i32> = (-8..=9).map(|h| h * 60).collect();
    cands.shuffle(&mut rng);
    inst.anchor_candidates = cands[..rng.random_range(3..=4)].iter().map(|&m| tz(m)).collect();
    let mut starts: Vec<u32> = (0..48).map(|k| k * 30).collect();
    starts.shuffle(&mut rng);
    starts.truncate(rng.random_range(4..=8));
    starts.sort_unstable();
    inst.day_start_candidates = Some(starts);
    inst.delta = *[0.5, 0.75, 1.0].choose(&mut rng).unwrap();
    inst.omega = *[0.5, 1.0].choose(&mut rng).unwrap();
    inst.validate().unwrap();
    inst
}

/// The same instance with every time zone and anchor candidate moved by `delta` minutes.
pub fn shifted(inst: &Instance, delta: i32) -> Instance {
    let mut out = inst.clone();
    for a in &mut out.attendees {
        a.tz = a.tz.shifted(delta).unwrap();
    }
    for c in &mut out.anchor_candidates {
        *c = c.shifted(delta).unwrap();
    }
    out
}
