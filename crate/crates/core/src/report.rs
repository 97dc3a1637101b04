//! Plain-text report helpers shared by the CSV writers.
//!
//! A report starts with one metadata line `# key=value,key=value,...`
//! followed by a column header and data rows. Numbers use `.` as decimal
//! separator and the shortest representation that round-trips.

use std::io::{self, Write};

pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float deterministically: shortest round-trip digits, switching
/// to exponent notation for very small or very large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_finite() && (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn clean(v: &str) -> String {
    v.replace([',', '\n', '\r'], ";")
}

pub fn write_meta<W: Write>(out: &mut W, meta: &[(String, String)]) -> io::Result<()> {
    let line: Vec<String> = std::iter::once(format!("schema_version={SCHEMA_VERSION}"))
        .chain(
            meta.iter()
                .filter(|(k, _)| k != "schema_version")
                .map(|(k, v)| format!("{}={}", clean(k), clean(v))),
        )
        .collect();
    writeln!(out, "# {}", line.join(","))
}

/// Parses a metadata line written by [`write_meta`].
pub fn parse_meta(line: &str) -> Option<Vec<(String, String)>> {
    let body = line.strip_prefix("# ")?;
    body.split(',')
        .map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}
