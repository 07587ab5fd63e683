use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{MacsError, Result};
use crate::metrics::MetricsReport;
use crate::sweep::SweepRecord;
use crate::time::TimeZoneOffset;

pub const COMFORT_CURVE_FILE: &str = "comfort_curve.csv";
pub const SPEAKER_CURVE_FILE: &str = "speaker_curve.csv";
pub const TIMEZONE_FILE: &str = "timezone_report.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const PRESENCE_FILE: &str = "presence.csv";

fn opt(v: Option<u32>) -> String {
    v.map(|w| w.to_string()).unwrap_or_default()
}

fn error_cell(r: &SweepRecord) -> String {
    r.error
        .as_deref()
        .map(|e| format!("\"{}\"", e.replace('"', "\"\"")))
        .unwrap_or_default()
}

/// `utc_offset_min,mean_potential_min`, one row per offset in ascending order.
pub fn format_timezone_csv(per_timezone: &BTreeMap<TimeZoneOffset, f64>) -> String {
    let mut s = String::from("utc_offset_min,mean_potential_min\n");
    for (tz, v) in per_timezone {
        let _ = writeln!(s, "{},{v:.4}", tz.minutes());
    }
    s
}

pub fn format_sweep_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(
        "delta,omega,talk_slot_min,mirrors,comfort_width_min,presentation_width_min,\
         satisfied_attendees,attendance_ratio,speaker_presence_ratio,total_conference_min,\
         feasible,anchors,day_start_min,error\n",
    );
    for r in records {
        let p = &r.point;
        let anchors: Vec<String> = r.anchors.iter().map(|a| a.minutes().to_string()).collect();
        let _ = writeln!(
            s,
            "{:.4},{:.4},{},{},{},{},{},{:.4},{:.4},{},{},{},{},{}",
            p.delta,
            p.omega,
            p.talk_slot_min,
            p.mirrors,
            opt(p.comfort_width_min),
            opt(p.presentation_width_min),
            r.satisfied_attendees,
            r.attendance_ratio,
            r.speaker_presence_ratio,
            r.total_conference_min,
            r.feasible,
            anchors.join(";"),
            r.day_start_min,
            error_cell(r),
        );
    }
    s
}

fn comfort_curve(records: &[SweepRecord]) -> String {
    let mut s = String::from("comfort_width_min,delta,mirrors,satisfied_attendees,attendance_ratio\n");
    for r in records.iter().filter(|r| r.error.is_none()) {
        if let Some(w) = r.point.comfort_width_min {
            let _ = writeln!(
                s,
                "{w},{:.4},{},{},{:.4}",
                r.point.delta, r.point.mirrors, r.satisfied_attendees, r.attendance_ratio
            );
        }
    }
    s
}

fn speaker_curve(records: &[SweepRecord]) -> String {
    let mut s = String::from("presentation_width_min,omega,speaker_presence_ratio,feasible\n");
    for r in records.iter().filter(|r| r.error.is_none()) {
        if let Some(w) = r.point.presentation_width_min {
            let _ = writeln!(s, "{w},{:.4},{:.4},{}", r.point.omega, r.speaker_presence_ratio, r.feasible);
        }
    }
    s
}

fn presence(report: &MetricsReport) -> String {
    let mut s = String::from("id,utc_offset_min,covered_min,presence_ratio,satisfied\n");
    for a in &report.attendees {
        let _ = writeln!(
            s,
            "{},{},{},{:.4},{}",
            a.id,
            a.utc_offset_min.minutes(),
            a.covered_min,
            a.presence_ratio,
            a.satisfied
        );
    }
    s
}

/// Writes the CSV reports into `out_dir` and returns the paths written.
///
/// The comfort and speaker curves take the sweep records that override the
/// comfort and presentation widths respectively. `presence.csv` is written
/// only when a metrics report is given.
pub fn write_reports(
    report: Option<&MetricsReport>,
    per_timezone: &BTreeMap<TimeZoneOffset, f64>,
    sweep: &[SweepRecord],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| MacsError::io(dir, e))?;
    let mut files = vec![
        (COMFORT_CURVE_FILE, comfort_curve(sweep)),
        (SPEAKER_CURVE_FILE, speaker_curve(sweep)),
        (TIMEZONE_FILE, format_timezone_csv(per_timezone)),
        (SWEEP_FILE, format_sweep_csv(sweep)),
    ];
    if let Some(r) = report {
        files.push((PRESENCE_FILE, presence(r)));
    }
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| MacsError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timezone_row_format() {
        let m = BTreeMap::from([(TimeZoneOffset::UTC, 1650.0)]);
        assert_eq!(format_timezone_csv(&m), "utc_offset_min,mean_potential_min\n0,1650.0000\n");
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let s = format_sweep_csv(&[]);
        assert_eq!(s.lines().count(), 1);
        assert!(s.starts_with("delta,omega,"));
    }

    #[test]
    fn rerun_is_byte_identical() {
        let m = BTreeMap::from([(TimeZoneOffset::new(-420).unwrap(), 812.5), (TimeZoneOffset::UTC, 1650.0)]);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let pa = write_reports(None, &m, &[], a.path()).unwrap();
        let pb = write_reports(None, &m, &[], b.path()).unwrap();
        assert_eq!(pa.len(), 4);
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        let tz = fs::read_to_string(a.path().join(TIMEZONE_FILE)).unwrap();
        assert_eq!(tz, "utc_offset_min,mean_potential_min\n-420,812.5000\n0,1650.0000\n");
    }
}
