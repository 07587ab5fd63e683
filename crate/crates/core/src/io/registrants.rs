use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{MacsError, Result};
use crate::model::Attendee;
use crate::time::{DailyWindow, TimeZoneOffset};

const HEADER: [&str; 4] = ["id", "utc_offset_min", "comfort_start_min", "comfort_end_min"];

/// Parses registrant CSV with the exact header
/// `id,utc_offset_min,comfort_start_min,comfort_end_min`.
pub fn parse_registrants_csv(text: &str, origin: &str) -> Result<Vec<Attendee>> {
    let err = |line: u64, msg: String| MacsError::Parse {
        path: origin.to_string(),
        location: format!("line {line}"),
        message: msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if header.iter().ne(HEADER) {
        return Err(err(1, format!("header must be `{}`", HEADER.join(","))));
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let num = |i: usize| -> Result<i64> {
            field(i)
                .parse::<i64>()
                .map_err(|e| err(line, format!("field `{}`: {e}", HEADER[i])))
        };
        let id = field(0).to_string();
        if id.is_empty() {
            return Err(err(line, "field `id` is empty".into()));
        }
        let offset = num(1)?;
        let tz = i32::try_from(offset)
            .map_err(|_| MacsError::InvalidOffset(i32::MAX))
            .and_then(TimeZoneOffset::new)
            .map_err(|e| err(line, format!("field `utc_offset_min`: {e}")))?;
        let (start, end) = (num(2)?, num(3)?);
        let comfort = u32::try_from(start)
            .ok()
            .zip(u32::try_from(end).ok())
            .ok_or(MacsError::InvalidWindow { start: 0, end: 0 })
            .and_then(|(s, e)| DailyWindow::new(s, e))
            .map_err(|e| err(line, format!("fields `comfort_start_min`/`comfort_end_min`: {e}")))?;
        if !seen.insert(id.clone()) {
            return Err(MacsError::DuplicateId(id));
        }
        out.push(Attendee::new(id, tz, comfort));
    }
    Ok(out)
}

pub fn load_registrants_csv(path: impl AsRef<Path>) -> Result<Vec<Attendee>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| MacsError::io(path, e))?;
    parse_registrants_csv(&text, &path.display().to_string())
}

pub fn write_registrants_csv(attendees: &[Attendee]) -> String {
    let mut s = HEADER.join(",");
    s.push('\n');
    for a in attendees {
        s.push_str(&format!(
            "{},{},{},{}\n",
            a.id,
            a.tz.minutes(),
            a.comfort.start_min(),
            a.comfort.end_min()
        ));
    }
    s
}
