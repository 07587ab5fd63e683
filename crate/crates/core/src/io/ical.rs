use std::fs;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime, TimeDelta};

use crate::error::{MacsError, Result};
use crate::model::MaterializedSchedule;

const PRODID: &str = "-//macs//mirror conference schedule//EN";

fn stamp(epoch: NaiveDateTime, minutes: i64) -> String {
    (epoch + TimeDelta::minutes(minutes)).format("%Y%m%dT%H%M%SZ").to_string()
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ';' => out.push_str("\\;"),
            ',' => out.push_str("\\,"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

/// Appends a content line folded at 75 octets, CRLF terminated.
fn push_line(out: &mut String, line: &str) {
    let mut width = 0;
    for c in line.chars() {
        let n = c.len_utf8();
        if width + n > 75 {
            out.push_str("\r\n ");
            width = 1;
        }
        out.push(c);
        width += n;
    }
    out.push_str("\r\n");
}

/// Calendar text for mirror `mirror`, with UTC minute 0 at midnight of `epoch`.
pub fn render_ical(ms: &MaterializedSchedule, mirror: usize, epoch: NaiveDate) -> String {
    let epoch = epoch.and_hms_opt(0, 0, 0).expect("midnight exists");
    let timetable = &ms.mirrors[mirror];
    let mut out = String::new();
    push_line(&mut out, "BEGIN:VCALENDAR");
    push_line(&mut out, "VERSION:2.0");
    push_line(&mut out, &format!("PRODID:{PRODID}"));
    push_line(&mut out, "CALSCALE:GREGORIAN");
    push_line(&mut out, &format!("X-WR-CALNAME:Mirror {mirror} ({})", timetable.anchor));
    for (slot, iv) in ms.slots.iter().zip(&timetable.utc) {
        push_line(&mut out, "BEGIN:VEVENT");
        push_line(&mut out, &format!("UID:{mirror}-{}", slot.session_id));
        push_line(&mut out, &format!("DTSTAMP:{}", stamp(epoch, 0)));
        push_line(&mut out, &format!("DTSTART:{}", stamp(epoch, iv.start_min)));
        push_line(&mut out, &format!("DTEND:{}", stamp(epoch, iv.end_min)));
        push_line(&mut out, &format!("SUMMARY:{}", escape(&slot.title)));
        push_line(&mut out, "END:VEVENT");
    }
    push_line(&mut out, "END:VCALENDAR");
    out
}

/// Writes `mirror-<m>.ics` for every mirror into `out_dir` and returns the
/// paths written.
pub fn export_ical(ms: &MaterializedSchedule, epoch: NaiveDate, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| MacsError::io(dir, e))?;
    (0..ms.num_mirrors())
        .map(|m| {
            let path = dir.join(format!("mirror-{m}.ics"));
            fs::write(&path, render_ical(ms, m, epoch)).map_err(|e| MacsError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
