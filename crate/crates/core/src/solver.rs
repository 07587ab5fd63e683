//! Heuristic search for mirror schedules.
//!
//! Anchor tuples and day starts are enumerated exhaustively; for each pair the
//! session order is improved by multi-start local search using swap and
//! single-insertion moves. The speaker threshold is folded into the objective
//! as a penalty, and the returned result reports whether it was met.
//!
//! For a fixed anchor tuple the coverage of every (attendee class, session,
//! start phase) triple is tabulated once, so evaluating an order costs one
//! table lookup per class and session.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MacsError, Result};
use crate::metrics::{self, covered_satisfies, MetricsReport};
use crate::model::{materialize, pack_starts, validate, Instance, Schedule, Violation};
use crate::time::{window_contains, window_overlap, AbsInterval, DailyWindow, TimeZoneOffset, MINUTES_PER_DAY};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub seed: u64,
    pub restarts: usize,
    pub moves_per_restart: usize,
    pub anchor_stride_min: i32,
    /// Weight λ of the speaker-threshold and non-overlap penalties.
    pub penalty_weight: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            restarts: 20,
            moves_per_restart: 5000,
            anchor_stride_min: 60,
            penalty_weight: 10.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(MacsError::InvalidInstance("restarts must be at least 1".into()));
        }
        if self.anchor_stride_min <= 0 || self.anchor_stride_min % 15 != 0 {
            return Err(MacsError::InvalidInstance(
                "anchor stride must be a positive multiple of 15".into(),
            ));
        }
        if self.penalty_weight.is_nan() || self.penalty_weight <= 0.0 {
            return Err(MacsError::InvalidInstance("penalty weight must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveResult {
    pub schedule: Schedule,
    pub metrics: MetricsReport,
    /// Speaker threshold met and no non-overlap violations.
    pub feasible: bool,
    pub objective: f64,
}

/// `attendance − λ·max(0, Ω − speaker ratio) − λ·violations`.
pub fn penalized_score(
    attendance: f64,
    speaker_ratio: f64,
    violations: usize,
    omega: f64,
    lambda: f64,
) -> f64 {
    attendance - lambda * (omega - speaker_ratio).max(0.0) - lambda * violations as f64
}

pub fn is_feasible(report: &MetricsReport, omega: f64) -> bool {
    report.speaker_presence_ratio >= omega && report.non_overlap_violations.is_empty()
}

/// Objective of a schedule, computed from its full metrics report.
pub fn score(instance: &Instance, schedule: &Schedule, delta: f64, omega: f64, lambda: f64) -> Result<f64> {
    let ms = materialize(schedule, instance)?;
    let r = metrics::report(instance, &ms, delta)?;
    Ok(penalized_score(
        r.attendance_ratio,
        r.speaker_presence_ratio,
        r.non_overlap_violations.len(),
        omega,
        lambda,
    ))
}

/// Metrics of an externally supplied schedule. Structural violations are
/// errors; non-overlap violations are reported inside the metrics.
pub fn evaluate(instance: &Instance, schedule: &Schedule, delta: f64) -> Result<MetricsReport> {
    let structural: Vec<Violation> = validate(schedule, instance)
        .into_iter()
        .filter(|v| !matches!(v, Violation::NonOverlapViolated(_)))
        .collect();
    if !structural.is_empty() {
        return Err(MacsError::InvalidSchedule(structural));
    }
    let ms = materialize(schedule, instance)?;
    metrics::report(instance, &ms, delta)
}

/// Distinct anchor tuples in increasing offset order, enumerated
/// lexicographically over the candidates that lie on the stride.
pub fn anchor_tuples(instance: &Instance, stride_min: i32) -> Result<Vec<Vec<TimeZoneOffset>>> {
    let mut cands: Vec<TimeZoneOffset> = instance
        .anchor_candidates
        .iter()
        .copied()
        .filter(|a| a.minutes() % stride_min == 0)
        .collect();
    cands.sort_unstable();
    cands.dedup();
    let m = instance.mirrors;
    if m == 0 || cands.len() < m {
        return Err(MacsError::SearchSpaceEmpty { mirrors: m });
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.iter().map(|&i| cands[i]).collect());
        // next combination
        let mut k = m;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if idx[k] < cands.len() - m + k {
                break;
            }
            if k == 0 {
                return Ok(out);
            }
        }
        idx[k] += 1;
        for j in k + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Attendees sharing a zone and comfort window are interchangeable.
struct AttendeeClass {
    tz: TimeZoneOffset,
    comfort: DailyWindow,
    count: i64,
}

struct SpeakerReq {
    tz: TimeZoneOffset,
    window: DailyWindow,
    sessions: Vec<usize>,
}

struct Problem {
    durations: Vec<u32>,
    total: i64,
    classes: Vec<AttendeeClass>,
    attendees: i64,
    speakers: Vec<SpeakerReq>,
    flagged: Vec<bool>,
    any_flagged: bool,
    grid: u32,
    phases: usize,
    days: u32,
    span: u32,
    delta: f64,
    omega: f64,
    lambda: f64,
}

impl Problem {
    fn new(instance: &Instance, config: &SolverConfig) -> Self {
        let mut classes: Vec<AttendeeClass> = Vec::new();
        for a in &instance.attendees {
            match classes.iter_mut().find(|c| c.tz == a.tz && c.comfort == a.comfort) {
                Some(c) => c.count += 1,
                None => classes.push(AttendeeClass {
                    tz: a.tz,
                    comfort: a.comfort,
                    count: 1,
                }),
            }
        }
        let index = instance.session_index();
        let speakers = instance
            .speakers
            .iter()
            .map(|sp| SpeakerReq {
                tz: instance.attendee(&sp.attendee_id).map(|a| a.tz).unwrap_or(TimeZoneOffset::UTC),
                window: sp.presentation_window,
                sessions: sp.session_ids.iter().map(|s| index[s.as_str()]).collect(),
            })
            .collect();
        let durations = instance.durations();
        let flagged: Vec<bool> = instance.sessions.iter().map(|s| s.non_overlap).collect();
        Problem {
            total: durations.iter().map(|&d| d as i64).sum(),
            durations,
            classes,
            attendees: instance.attendees.len() as i64,
            speakers,
            any_flagged: flagged.iter().any(|&f| f),
            flagged,
            grid: instance.slot_grid_min,
            phases: (1440 / instance.slot_grid_min) as usize,
            days: instance.days,
            span: instance.max_day_span_min,
            delta: instance.delta,
            omega: instance.omega,
            lambda: config.penalty_weight,
        }
    }

    fn phase(&self, local_start: i64) -> usize {
        (local_start.rem_euclid(MINUTES_PER_DAY) as u32 / self.grid) as usize
    }
}

/// Lookup tables for one set of anchors, given as minute offsets.
struct Tables {
    anchors: Vec<i64>,
    /// `cover[(class * n + session) * phases + phase]`: best-mirror minutes.
    cover: Vec<u16>,
    /// `speaker_ok[speaker][k][phase]` for the speaker's k-th session.
    speaker_ok: Vec<Vec<Vec<bool>>>,
}

impl Tables {
    fn build(p: &Problem, anchors: Vec<i64>) -> Self {
        let n = p.durations.len();
        let interval = |session: usize, phase: usize, anchor: i64, tz: TimeZoneOffset| {
            let start = (phase as u32 * p.grid) as i64 - anchor + tz.minutes() as i64;
            AbsInterval::new(start, start + p.durations[session] as i64)
        };
        let mut cover = vec![0; p.classes.len() * n * p.phases];
        for (c, class) in p.classes.iter().enumerate() {
            for s in 0..n {
                for ph in 0..p.phases {
                    cover[(c * n + s) * p.phases + ph] = anchors
                        .iter()
                        .map(|&a| window_overlap(&interval(s, ph, a, class.tz), &class.comfort) as u16)
                        .max()
                        .unwrap_or(0);
                }
            }
        }
        let speaker_ok = p
            .speakers
            .iter()
            .map(|sp| {
                sp.sessions
                    .iter()
                    .map(|&s| {
                        (0..p.phases)
                            .map(|ph| {
                                anchors
                                    .iter()
                                    .all(|&a| window_contains(&interval(s, ph, a, sp.tz), &sp.window))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Tables {
            anchors,
            cover,
            speaker_ok,
        }
    }

    /// Best achievable score at `day_start`, ignoring penalties and the
    /// interaction between sessions: each session may take any start it could
    /// occupy within a day.
    fn upper_bound(&self, p: &Problem, day_start: u32) -> f64 {
        let n = p.durations.len();
        let mut satisfiable = 0;
        for (c, class) in p.classes.iter().enumerate() {
            let mut best_total = 0;
            for s in 0..n {
                let d = p.durations[s];
                let mut best = 0;
                let mut offset = 0;
                while offset + d <= p.span {
                    let ph = p.phase((day_start + offset) as i64);
                    best = best.max(self.cover[(c * n + s) * p.phases + ph]);
                    offset += p.grid;
                }
                best_total += best as i64;
            }
            if covered_satisfies(best_total, p.total, p.delta) {
                satisfiable += class.count;
            }
        }
        satisfiable as f64 / p.attendees as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    score: f64,
    covered: i64,
}

impl Key {
    fn cmp(&self, other: &Key) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then(self.covered.cmp(&other.covered))
    }
}

/// Orders candidates by key, then prefers the lexicographically smaller order.
fn better(a: (&Key, &[usize]), b: (&Key, &[usize])) -> bool {
    match a.0.cmp(b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.1 < b.1,
    }
}

struct Scratch {
    starts: Vec<i64>,
    phase: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            starts: Vec::with_capacity(n),
            phase: vec![0; n],
        }
    }
}

fn evaluate_order(
    p: &Problem,
    t: &Tables,
    day_start: u32,
    order: &[usize],
    sc: &mut Scratch,
) -> Option<Key> {
    pack_starts(
        order.iter().map(|&s| p.durations[s]),
        day_start,
        p.days,
        p.span,
        &mut sc.starts,
    )
    .ok()?;
    let n = order.len();
    for (k, &s) in order.iter().enumerate() {
        sc.phase[s] = p.phase(sc.starts[k]);
    }

    let mut satisfied = 0;
    let mut covered_sum = 0;
    for (c, class) in p.classes.iter().enumerate() {
        let rows = &t.cover[c * n * p.phases..(c + 1) * n * p.phases];
        let covered: i64 = rows
            .chunks_exact(p.phases)
            .zip(&sc.phase)
            .map(|(row, &ph)| row[ph] as i64)
            .sum();
        if covered_satisfies(covered, p.total, p.delta) {
            satisfied += class.count;
        }
        covered_sum += class.count * covered;
    }

    let speaker_ratio = if p.speakers.is_empty() {
        1.0
    } else {
        let ok = t
            .speaker_ok
            .iter()
            .zip(&p.speakers)
            .filter(|(table, sp)| {
                sp.sessions
                    .iter()
                    .zip(table.iter())
                    .all(|(&s, row)| row[sc.phase[s]])
            })
            .count();
        ok as f64 / p.speakers.len() as f64
    };

    let violations = if p.any_flagged {
        count_overlaps(p, &t.anchors, order, &sc.starts)
    } else {
        0
    };

    Some(Key {
        score: penalized_score(
            satisfied as f64 / p.attendees as f64,
            speaker_ratio,
            violations,
            p.omega,
            p.lambda,
        ),
        covered: covered_sum,
    })
}

fn count_overlaps(p: &Problem, anchors: &[i64], order: &[usize], starts: &[i64]) -> usize {
    let utc = |k: usize, m: usize| {
        let s = starts[k] - anchors[m];
        AbsInterval::new(s, s + p.durations[order[k]] as i64)
    };
    (0..order.len())
        .filter(|&k| p.flagged[order[k]])
        .filter(|&k| {
            (0..anchors.len()).any(|m| {
                let iv = utc(k, m);
                (0..anchors.len())
                    .filter(|&m2| m2 != m)
                    .any(|m2| (0..order.len()).any(|k2| k2 != k && utc(k2, m2).intersects(&iv)))
            })
        })
        .count()
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// One swap or single-insertion move, applied in place.
fn random_move(order: &mut [usize], rng: &mut ChaCha8Rng) {
    let n = order.len();
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    if rng.random_bool(0.5) {
        order.swap(i, j);
    } else if i < j {
        order[i..=j].rotate_left(1);
    } else {
        order[j..=i].rotate_right(1);
    }
}

/// Runs the restarts of one (anchors, day start) context.
fn local_search(
    p: &Problem,
    t: &Tables,
    day_start: u32,
    seed: u64,
    config: &SolverConfig,
) -> Option<(Key, Vec<usize>)> {
    let n = p.durations.len();
    let mut sc = Scratch::new(n);
    let mut best: Option<(Key, Vec<usize>)> = None;
    let unfit = Key {
        score: f64::NEG_INFINITY,
        covered: i64::MIN,
    };

    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(restart as u64)));
        let mut current: Vec<usize> = (0..n).collect();
        if restart > 0 {
            current.shuffle(&mut rng);
        }
        let mut current_key = evaluate_order(p, t, day_start, &current, &mut sc).unwrap_or(unfit);
        let mut pass_best = (current_key, current.clone());
        let mut candidate = current.clone();

        if n > 1 {
            for _ in 0..config.moves_per_restart {
                candidate.copy_from_slice(&current);
                random_move(&mut candidate, &mut rng);
                let Some(key) = evaluate_order(p, t, day_start, &candidate, &mut sc) else {
                    continue;
                };
                if key.cmp(&current_key) != Ordering::Less {
                    std::mem::swap(&mut current, &mut candidate);
                    current_key = key;
                    if better((&current_key, &current), (&pass_best.0, &pass_best.1)) {
                        pass_best = (current_key, current.clone());
                    }
                }
            }
        }

        if pass_best.0.score == f64::NEG_INFINITY {
            continue;
        }
        if best
            .as_ref()
            .is_none_or(|b| better((&pass_best.0, &pass_best.1), (&b.0, &b.1)))
        {
            best = Some(pass_best);
        }
    }
    best
}

/// Best score found so far by any context. Contexts whose bound lies strictly
/// below it cannot hold the final answer, so skipping them never changes the
/// result regardless of the order in which contexts finish.
struct Incumbent(std::sync::Mutex<f64>);

impl Incumbent {
    fn get(&self) -> f64 {
        *self.0.lock().unwrap()
    }

    fn raise(&self, score: f64) {
        let mut g = self.0.lock().unwrap();
        if score > *g {
            *g = score;
        }
    }
}

/// Contexts that produce identical UTC timetables.
///
/// Moving the day start and every anchor by the same number of minutes leaves
/// all UTC intervals unchanged, so a context is identified by its anchors
/// relative to a grid-aligned shift and by the shifted day start. Each class
/// is searched once, with a seed drawn from the relative anchor offsets only;
/// that seed is also unchanged when every zone and anchor moves together.
struct ContextClass {
    /// Index into the distinct relative anchor sets.
    shape: usize,
    day_start: u32,
    /// Preferred member: day start nearest 08:00, then earliest tuple and
    /// day start. This is the context reported when the class wins.
    rep: (u32, usize, u32),
}

const PREFERRED_DAY_START: i64 = 480;

pub(crate) fn preference(tuple_index: usize, day_start: u32) -> (u32, usize, u32) {
    let d = (day_start as i64 - PREFERRED_DAY_START).rem_euclid(MINUTES_PER_DAY);
    (d.min(MINUTES_PER_DAY - d) as u32, tuple_index, day_start)
}

fn context_classes(tuples: &[Vec<TimeZoneOffset>], day_starts: &[u32], grid: u32) -> (Vec<Vec<i64>>, Vec<ContextClass>) {
    let mut shapes: Vec<Vec<i64>> = Vec::new();
    let mut shape_index = std::collections::HashMap::new();
    let mut seen = std::collections::HashMap::new();
    let mut classes = Vec::new();
    for (i, tuple) in tuples.iter().enumerate() {
        let a0 = tuple[0].minutes() as i64;
        let shift = a0 - a0.rem_euclid(grid as i64);
        let rel: Vec<i64> = tuple.iter().map(|a| a.minutes() as i64 - shift).collect();
        let shape = *shape_index.entry(rel.clone()).or_insert_with(|| {
            shapes.push(rel);
            shapes.len() - 1
        });
        for &ds in day_starts {
            let local = (ds as i64 - shift).rem_euclid(MINUTES_PER_DAY) as u32;
            let rep = preference(i, ds);
            let k = *seen.entry((shape, local)).or_insert_with(|| {
                classes.push(ContextClass {
                    shape,
                    day_start: local,
                    rep,
                });
                classes.len() - 1
            });
            classes[k].rep = classes[k].rep.min(rep);
        }
    }
    (shapes, classes)
}

/// Searches anchors, day start and session order for the best schedule.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveResult> {
    instance.validate()?;
    config.validate()?;
    if instance.attendees.is_empty() {
        return Err(MacsError::EmptyAttendeeSet);
    }
    let tuples = anchor_tuples(instance, config.anchor_stride_min)?;
    let problem = Problem::new(instance, config);
    let (shapes, classes) = context_classes(&tuples, &instance.day_starts(), problem.grid);
    let tables: Vec<Tables> = shapes.iter().map(|s| Tables::build(&problem, s.clone())).collect();
    let seeds: Vec<u64> = shapes
        .iter()
        .map(|s| {
            s.windows(2)
                .fold(splitmix(config.seed), |h, w| splitmix(h ^ (w[1] - w[0]) as u64))
        })
        .collect();

    // most promising contexts first so the bound prunes early
    let bounds: Vec<f64> = classes
        .iter()
        .map(|c| tables[c.shape].upper_bound(&problem, c.day_start))
        .collect();
    let mut queue: Vec<usize> = (0..classes.len()).collect();
    queue.sort_by(|&a, &b| bounds[b].total_cmp(&bounds[a]).then(a.cmp(&b)));

    let incumbent = Incumbent(std::sync::Mutex::new(f64::NEG_INFINITY));
    let run = |&k: &usize| -> Option<(usize, Key, Vec<usize>)> {
        if bounds[k] < incumbent.get() {
            return None;
        }
        let c = &classes[k];
        let (key, order) = local_search(&problem, &tables[c.shape], c.day_start, seeds[c.shape], config)?;
        incumbent.raise(key.score);
        Some((k, key, order))
    };
    #[cfg(feature = "parallel")]
    let mut found: Vec<(usize, Key, Vec<usize>)> = {
        use rayon::prelude::*;
        queue.par_iter().filter_map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut found: Vec<(usize, Key, Vec<usize>)> = queue.iter().filter_map(run).collect();

    // fixed reduction order: the preferred context wins ties
    found.sort_by_key(|(k, _, _)| classes[*k].rep);
    let mut best: Option<(usize, Key, Vec<usize>)> = None;
    for cand in found {
        if best
            .as_ref()
            .is_none_or(|b| better((&cand.1, &cand.2), (&b.1, &b.2)))
        {
            best = Some(cand);
        }
    }
    let Some((k, key, order)) = best else {
        return Err(MacsError::CapacityExceeded {
            placed: 0,
            total: instance.sessions.len(),
            days: instance.days,
            span_min: instance.max_day_span_min,
        });
    };

    let (_, tuple_index, day_start) = classes[k].rep;
    let schedule = Schedule {
        anchors: tuples[tuple_index].clone(),
        day_start_min: day_start,
        order: order.iter().map(|&s| instance.sessions[s].id.clone()).collect(),
    };
    let metrics = evaluate(instance, &schedule, instance.delta)?;
    let objective = penalized_score(
        metrics.attendance_ratio,
        metrics.speaker_presence_ratio,
        metrics.non_overlap_violations.len(),
        instance.omega,
        config.penalty_weight,
    );
    debug_assert_eq!(objective, key.score, "table and report disagree");
    Ok(SolveResult {
        feasible: is_feasible(&metrics, instance.omega),
        schedule,
        metrics,
        objective,
    })
}
