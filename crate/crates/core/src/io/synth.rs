use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MacsError, Result};
use crate::model::{Attendee, Instance, Session, SessionKind, SpeakerProfile};
use crate::time::{DailyWindow, TimeZoneOffset};

/// Synthetic 355-registrant histogram shipped with the crate.
pub const SAMPLE_HISTOGRAM_CSV: &str = include_str!("../../data/registrant_histogram_synthetic.csv");

/// Registrant counts per UTC offset. The total is always positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<TimeZoneOffset, u64>", into = "BTreeMap<TimeZoneOffset, u64>")]
pub struct TimezoneHistogram(BTreeMap<TimeZoneOffset, u64>);

impl TimezoneHistogram {
    pub fn new(counts: BTreeMap<TimeZoneOffset, u64>) -> Result<Self> {
        if counts.values().sum::<u64>() == 0 {
            return Err(MacsError::EmptyHistogram);
        }
        Ok(TimezoneHistogram(counts))
    }

    pub fn counts(&self) -> &BTreeMap<TimeZoneOffset, u64> {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

impl TryFrom<BTreeMap<TimeZoneOffset, u64>> for TimezoneHistogram {
    type Error = MacsError;

    fn try_from(m: BTreeMap<TimeZoneOffset, u64>) -> Result<Self> {
        TimezoneHistogram::new(m)
    }
}

impl From<TimezoneHistogram> for BTreeMap<TimeZoneOffset, u64> {
    fn from(h: TimezoneHistogram) -> Self {
        h.0
    }
}

/// Parses `utc_offset_min,count` CSV. Lines starting with `#` are comments.
pub fn parse_histogram(text: &str, origin: &str) -> Result<TimezoneHistogram> {
    let err = |line: u64, msg: String| MacsError::Parse {
        path: origin.to_string(),
        location: format!("line {line}"),
        message: msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if header.iter().ne(["utc_offset_min", "count"]) {
        return Err(err(1, "header must be `utc_offset_min,count`".into()));
    }
    let mut counts = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let offset: i32 = rec[0]
            .trim()
            .parse()
            .map_err(|e| err(line, format!("field `utc_offset_min`: {e}")))?;
        let tz = TimeZoneOffset::new(offset).map_err(|e| err(line, e.to_string()))?;
        let count: u64 = rec[1]
            .trim()
            .parse()
            .map_err(|e| err(line, format!("field `count`: {e}")))?;
        if counts.insert(tz, count).is_some() {
            return Err(MacsError::DuplicateId(tz.minutes().to_string()));
        }
    }
    TimezoneHistogram::new(counts)
}

pub fn load_histogram(path: impl AsRef<Path>) -> Result<TimezoneHistogram> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| MacsError::io(path, e))?;
    parse_histogram(&text, &path.display().to_string())
}

pub fn sample_histogram() -> TimezoneHistogram {
    parse_histogram(SAMPLE_HISTOGRAM_CSV, "sample histogram").expect("bundled histogram parses")
}

/// Draws `n` registrants with offsets proportional to `hist`, ids `r0001`,
/// `r0002`, ... and the default 08:00-20:00 comfort window.
pub fn synth_registrants(hist: &TimezoneHistogram, n: usize, seed: u64) -> Result<Vec<Attendee>> {
    if n == 0 {
        return Err(MacsError::InvalidInstance("registrant count must be at least 1".into()));
    }
    let (zones, weights): (Vec<TimeZoneOffset>, Vec<u64>) =
        hist.counts().iter().filter(|(_, &c)| c > 0).map(|(z, c)| (*z, *c)).unzip();
    let dist = WeightedIndex::new(&weights).map_err(|_| MacsError::EmptyHistogram)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.to_string().len().max(4);
    Ok((1..=n)
        .map(|i| {
            let tz = zones[dist.sample(&mut rng)];
            Attendee::new(format!("r{i:0width$}"), tz, DailyWindow::DEFAULT_COMFORT)
        })
        .collect())
}

/// The three-day single-track program: opening, three keynotes, nine paper
/// sessions (38 papers), a poster session, an award session, nine 30-minute
/// breaks and three one-hour lunches. With 22-minute talks on a 30-minute grid
/// it totals 1650 minutes.
pub fn conference_sessions() -> Vec<Session> {
    const TALKS: [u32; 9] = [4, 4, 5, 4, 4, 5, 4, 4, 4];
    let mut s = vec![Session::fixed("opening", SessionKind::Opening, 30).with_title("Opening")];
    for k in 1..=3 {
        s.push(Session::fixed(format!("keynote-{k}"), SessionKind::Keynote, 60).with_title(format!("Keynote {k}")));
    }
    for (k, &talks) in TALKS.iter().enumerate() {
        s.push(Session::talks(format!("papers-{}", k + 1), talks).with_title(format!("Paper Session {}", k + 1)));
    }
    s.push(Session::fixed("posters", SessionKind::Poster, 90).with_title("Posters and Demos"));
    s.push(Session::fixed("awards", SessionKind::Award, 30).with_title("Awards and Closing"));
    for k in 1..=9 {
        s.push(Session::fixed(format!("break-{k}"), SessionKind::Break, 30).with_title("Break"));
    }
    for k in 1..=3 {
        s.push(Session::fixed(format!("lunch-{k}"), SessionKind::Social, 60).with_title("Lunch"));
    }
    s
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Region {
    Americas,
    Emea,
    AsiaPacific,
}

fn region(tz: TimeZoneOffset) -> Region {
    match tz.minutes() {
        m if m <= -180 => Region::Americas,
        m if m < 300 => Region::Emea,
        _ => Region::AsiaPacific,
    }
}

/// A 3-day, 600-minute-per-day conference instance with `n` registrants
/// drawn from `hist`. Speakers are drawn from the registrants, each paper
/// session and keynote taking its speakers from a single region; every
/// speaker gets a 08:00-22:00 presentation window.
pub fn synthetic_conference(hist: &TimezoneHistogram, n: usize, seed: u64) -> Result<Instance> {
    use Region::*;
    const PAPER_REGIONS: [Region; 9] = [
        Emea, Americas, AsiaPacific, Emea, Americas, AsiaPacific, Emea, Americas, AsiaPacific,
    ];
    const KEYNOTE_REGIONS: [Region; 3] = [Emea, Americas, AsiaPacific];

    let attendees = synth_registrants(hist, n, seed)?;
    let mut sessions = conference_sessions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5bea_6e75);
    let mut pool: Vec<usize> = (0..attendees.len()).collect();
    pool.shuffle(&mut rng);
    let mut used = vec![false; attendees.len()];

    let mut pick = |want: Region, k: usize| -> Vec<String> {
        let mut chosen = Vec::with_capacity(k);
        for pass in 0..2 {
            for &i in &pool {
                if chosen.len() == k {
                    break;
                }
                if !used[i] && (pass == 1 || region(attendees[i].tz) == want) {
                    used[i] = true;
                    chosen.push(attendees[i].id.clone());
                }
            }
        }
        chosen
    };

    let mut speakers = Vec::new();
    for s in &mut sessions {
        let (want, k) = match (s.kind, s.id.rsplit_once('-')) {
            (SessionKind::Keynote, Some((_, k))) => (KEYNOTE_REGIONS[k.parse::<usize>().unwrap() - 1], 1),
            (SessionKind::Paper, Some((_, k))) => (
                PAPER_REGIONS[k.parse::<usize>().unwrap() - 1],
                s.num_talks.unwrap_or(1) as usize,
            ),
            _ => continue,
        };
        let ids = pick(want, k);
        for id in &ids {
            speakers.push(SpeakerProfile {
                attendee_id: id.clone(),
                presentation_window: DailyWindow::new(480, 1320)?,
                session_ids: vec![s.id.clone()],
            });
        }
        s.speaker_ids = ids;
    }

    let inst = Instance::new(sessions, attendees, speakers, 3, 600);
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(i32, u64)]) -> TimezoneHistogram {
        TimezoneHistogram::new(pairs.iter().map(|&(m, c)| (TimeZoneOffset::new(m).unwrap(), c)).collect()).unwrap()
    }

    #[test]
    fn single_bucket() {
        let v = synth_registrants(&hist(&[(0, 1)]), 5, 1).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.iter().all(|a| a.tz.minutes() == 0 && a.comfort == DailyWindow::DEFAULT_COMFORT));
        assert_eq!(v[0].id, "r0001");
    }

    #[test]
    fn deterministic() {
        let h = sample_histogram();
        assert_eq!(synth_registrants(&h, 50, 9).unwrap(), synth_registrants(&h, 50, 9).unwrap());
        assert_ne!(synth_registrants(&h, 50, 9).unwrap(), synth_registrants(&h, 50, 10).unwrap());
    }

    #[test]
    fn two_buckets_concentrate() {
        let v = synth_registrants(&hist(&[(0, 1), (480, 1)]), 10_000, 42).unwrap();
        let zero = v.iter().filter(|a| a.tz.minutes() == 0).count() as i64;
        assert!((zero - 5000).abs() <= 250, "{zero}");
    }

    #[test]
    fn empty_histogram() {
        assert!(matches!(
            TimezoneHistogram::new([(TimeZoneOffset::UTC, 0)].into()),
            Err(MacsError::EmptyHistogram)
        ));
        assert!(matches!(
            parse_histogram("utc_offset_min,count\n", "mem"),
            Err(MacsError::EmptyHistogram)
        ));
    }

    #[test]
    fn bundled_histogram_totals_355() {
        assert_eq!(sample_histogram().total(), 355);
    }

    #[test]
    fn program_totals_1650_minutes() {
        let inst = synthetic_conference(&sample_histogram(), 355, 7).unwrap();
        assert_eq!(inst.sessions.len(), 27);
        assert_eq!(inst.total_duration_min(), 1650);
        assert_eq!(inst.attendees.len(), 355);
        // 38 papers plus 3 keynotes, each with its own speaker
        assert_eq!(inst.speakers.len(), 41);
        let papers: u32 = inst.sessions.iter().filter_map(|s| s.num_talks).sum();
        assert_eq!(papers, 38);
    }

    #[test]
    fn speakers_share_a_region_per_session() {
        let inst = synthetic_conference(&sample_histogram(), 355, 7).unwrap();
        for s in inst.sessions.iter().filter(|s| !s.speaker_ids.is_empty()) {
            let regions: Vec<Region> = s
                .speaker_ids
                .iter()
                .map(|id| region(inst.attendee(id).unwrap().tz))
                .collect();
            assert!(regions.windows(2).all(|w| w[0] == w[1]), "{}", s.id);
        }
    }
}
