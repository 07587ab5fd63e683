//! Minute-granularity time arithmetic.
//!
//! All instants are integer minutes. Absolute instants count from the
//! conference epoch (00:00 UTC of the first day); local instants are the same
//! count shifted by a fixed offset. Local minutes may be negative, and the day
//! index of a local instant is `floor(t / 1440)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MacsError, Result};

pub const MINUTES_PER_DAY: i64 = 1440;

const MIN_OFFSET: i32 = -720;
const MAX_OFFSET: i32 = 840;

/// Fixed offset from UTC in minutes east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct TimeZoneOffset(i32);

impl TimeZoneOffset {
    pub const UTC: TimeZoneOffset = TimeZoneOffset(0);

    pub fn new(offset_min: i32) -> Result<Self> {
        if !(MIN_OFFSET..=MAX_OFFSET).contains(&offset_min) || offset_min % 15 != 0 {
            return Err(MacsError::InvalidOffset(offset_min));
        }
        Ok(TimeZoneOffset(offset_min))
    }

    pub fn hours(h: i32) -> Result<Self> {
        Self::new(h * 60)
    }

    pub fn minutes(self) -> i32 {
        self.0
    }

    /// Offset shifted by `delta` minutes, if the result is still a valid zone.
    pub fn shifted(self, delta: i32) -> Result<Self> {
        Self::new(self.0 + delta)
    }

    /// Every valid offset that is a multiple of `stride_min`, ascending.
    pub fn grid(stride_min: i32) -> Vec<TimeZoneOffset> {
        assert!(stride_min > 0 && stride_min % 15 == 0);
        (MIN_OFFSET..=MAX_OFFSET)
            .filter(|m| m % stride_min == 0)
            .map(TimeZoneOffset)
            .collect()
    }
}

impl TryFrom<i32> for TimeZoneOffset {
    type Error = MacsError;

    fn try_from(v: i32) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TimeZoneOffset> for i32 {
    fn from(tz: TimeZoneOffset) -> i32 {
        tz.0
    }
}

impl fmt::Display for TimeZoneOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { '-' } else { '+' };
        let abs = self.0.unsigned_abs();
        write!(f, "UTC{}{:02}:{:02}", sign, abs / 60, abs % 60)
    }
}

/// A daily local-time window `[start, end)`, wrapping past midnight when
/// `end < start`. The full day is represented as `[0, 1440)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct DailyWindow {
    start: u32,
    end: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    start_min: u32,
    end_min: u32,
}

impl TryFrom<RawWindow> for DailyWindow {
    type Error = MacsError;

    fn try_from(raw: RawWindow) -> Result<Self> {
        DailyWindow::new(raw.start_min, raw.end_min)
    }
}

impl From<DailyWindow> for RawWindow {
    fn from(w: DailyWindow) -> Self {
        RawWindow {
            start_min: w.start,
            end_min: w.end,
        }
    }
}

impl DailyWindow {
    pub const FULL_DAY: DailyWindow = DailyWindow {
        start: 0,
        end: 1440,
    };

    /// 08:00-20:00.
    pub const DEFAULT_COMFORT: DailyWindow = DailyWindow {
        start: 480,
        end: 1200,
    };

    pub fn new(start_min: u32, end_min: u32) -> Result<Self> {
        if start_min >= 1440 || end_min > 1440 || start_min == end_min {
            return Err(MacsError::InvalidWindow {
                start: start_min,
                end: end_min,
            });
        }
        // a window ending at midnight is stored as wrapping to 00:00
        let end = if end_min == 1440 && start_min != 0 { 0 } else { end_min };
        Ok(DailyWindow {
            start: start_min,
            end,
        })
    }

    /// Window of `width_min` minutes starting at `start_min` local time.
    /// A width of 1440 or more yields the full day.
    pub fn from_start_width(start_min: u32, width_min: u32) -> Result<Self> {
        if width_min == 0 || start_min >= 1440 {
            return Err(MacsError::InvalidWindow {
                start: start_min,
                end: start_min + width_min,
            });
        }
        if width_min >= 1440 {
            return Ok(Self::FULL_DAY);
        }
        Self::new(start_min, (start_min + width_min) % 1440)
    }

    pub fn start_min(&self) -> u32 {
        self.start
    }

    pub fn end_min(&self) -> u32 {
        self.end
    }

    pub fn wraps(&self) -> bool {
        self.end < self.start
    }

    pub fn is_full_day(&self) -> bool {
        self.start == 0 && self.end == 1440
    }

    pub fn width_min(&self) -> u32 {
        if self.wraps() {
            1440 - self.start + self.end
        } else {
            self.end - self.start
        }
    }

    /// The same window moved `delta` minutes later on the clock.
    pub fn shifted(&self, delta: i64) -> DailyWindow {
        if self.is_full_day() {
            return *self;
        }
        let start = (self.start as i64 + delta).rem_euclid(MINUTES_PER_DAY) as u32;
        let end = (start + self.width_min()) % 1440;
        DailyWindow { start, end }
    }

    /// Non-wrapping pieces of the window within a single day, as
    /// minutes-of-day half-open ranges.
    fn pieces(&self) -> [(i64, i64); 2] {
        let (s, e) = (self.start as i64, self.end as i64);
        if self.wraps() {
            [(0, e), (s, MINUTES_PER_DAY)]
        } else {
            [(s, e), (0, 0)]
        }
    }
}

impl fmt::Display for DailyWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:02}:{:02}-{:02}:{:02}",
            self.start / 60,
            self.start % 60,
            self.end / 60,
            self.end % 60
        )
    }
}

/// Half-open interval `[start, end)` of minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsInterval {
    pub start_min: i64,
    pub end_min: i64,
}

impl AbsInterval {
    pub fn new(start_min: i64, end_min: i64) -> Self {
        debug_assert!(end_min > start_min, "empty interval [{start_min}, {end_min})");
        AbsInterval { start_min, end_min }
    }

    pub fn len(&self) -> i64 {
        self.end_min - self.start_min
    }

    pub fn is_empty(&self) -> bool {
        self.end_min <= self.start_min
    }

    pub fn shifted(&self, delta: i64) -> AbsInterval {
        AbsInterval {
            start_min: self.start_min + delta,
            end_min: self.end_min + delta,
        }
    }

    pub fn intersects(&self, other: &AbsInterval) -> bool {
        self.start_min < other.end_min && other.start_min < self.end_min
    }

    /// The interval as seen on a clock `tz` minutes ahead of UTC.
    pub fn to_local(&self, tz: TimeZoneOffset) -> AbsInterval {
        self.shifted(tz.minutes() as i64)
    }
}

/// Converts absolute UTC minutes to local minutes.
pub fn to_local(t: i64, tz: TimeZoneOffset) -> i64 {
    t + tz.minutes() as i64
}

/// Day index of a local instant.
pub fn day_index(t: i64) -> i64 {
    t.div_euclid(MINUTES_PER_DAY)
}

fn overlap_len(a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0)
}

/// Minutes of the local interval `iv` falling inside the daily window `w`,
/// summed over every local day the interval touches.
pub fn window_overlap(iv: &AbsInterval, w: &DailyWindow) -> i64 {
    if iv.is_empty() {
        return 0;
    }
    if w.is_full_day() {
        return iv.len();
    }
    let first = day_index(iv.start_min);
    let last = day_index(iv.end_min - 1);
    let pieces = w.pieces();
    let mut total = 0;
    for day in first..=last {
        let base = day * MINUTES_PER_DAY;
        for (s, e) in pieces {
            if e > s {
                total += overlap_len((iv.start_min, iv.end_min), (base + s, base + e));
            }
        }
    }
    total
}

/// True when every minute of `iv` lies inside `w`.
pub fn window_contains(iv: &AbsInterval, w: &DailyWindow) -> bool {
    window_overlap(iv, w) == iv.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: u32, e: u32) -> DailyWindow {
        DailyWindow::new(s, e).unwrap()
    }

    #[test]
    fn to_local_examples() {
        assert_eq!(to_local(600, TimeZoneOffset::UTC), 600);
        assert_eq!(to_local(600, TimeZoneOffset::new(480).unwrap()), 1080);
        assert_eq!(to_local(60, TimeZoneOffset::new(-120).unwrap()), -60);
        assert_eq!(day_index(-60), -1);
    }

    #[test]
    fn offset_bounds() {
        assert!(TimeZoneOffset::new(-720).is_ok());
        assert!(TimeZoneOffset::new(840).is_ok());
        assert!(TimeZoneOffset::new(900).is_err());
        assert!(TimeZoneOffset::new(-735).is_err());
        assert!(TimeZoneOffset::new(330).is_ok());
        assert!(TimeZoneOffset::new(10).is_err());
        assert_eq!(TimeZoneOffset::grid(60).len(), 27);
    }

    #[test]
    fn window_validation() {
        assert!(DailyWindow::new(480, 480).is_err());
        assert!(DailyWindow::new(1440, 100).is_err());
        assert_eq!(w(960, 1440), w(960, 0));
        assert_eq!(w(960, 1440).width_min(), 480);
        assert!(DailyWindow::new(0, 1440).unwrap().is_full_day());
        assert_eq!(w(1320, 360).width_min(), 480);
        assert!(w(1320, 360).wraps());
        assert_eq!(DailyWindow::from_start_width(480, 720).unwrap(), w(480, 1200));
        assert_eq!(DailyWindow::from_start_width(1200, 480).unwrap(), w(1200, 240));
        assert!(DailyWindow::from_start_width(480, 1440).unwrap().is_full_day());
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(window_overlap(&AbsInterval::new(1140, 1260), &w(480, 1200)), 60);
        assert_eq!(window_overlap(&AbsInterval::new(0, 1440), &DailyWindow::FULL_DAY), 1440);
        assert_eq!(window_overlap(&AbsInterval::new(0, 120), &w(1320, 360)), 120);
    }

    #[test]
    fn overlap_negative_and_multi_day() {
        // 22:00 previous day to 02:00 against 23:00-01:00 (wrapping)
        assert_eq!(window_overlap(&AbsInterval::new(-120, 120), &w(1380, 60)), 120);
        // three full days against an 8-hour window
        assert_eq!(window_overlap(&AbsInterval::new(0, 3 * 1440), &w(480, 960)), 3 * 480);
    }

    #[test]
    fn shifted_window_wraps() {
        assert_eq!(w(480, 1200).shifted(600), w(1080, 360));
        assert_eq!(w(480, 1200).shifted(-600), w(1320, 600));
        assert!(DailyWindow::FULL_DAY.shifted(37).is_full_day());
    }

    #[test]
    fn display() {
        assert_eq!(TimeZoneOffset::new(-420).unwrap().to_string(), "UTC-07:00");
        assert_eq!(TimeZoneOffset::new(330).unwrap().to_string(), "UTC+05:30");
        assert_eq!(w(480, 1200).to_string(), "08:00-20:00");
    }
}
