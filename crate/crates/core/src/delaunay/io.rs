//! Site files: one `x y` pair per line, separated by whitespace or a comma.
//! Blank lines and lines starting with `#` are skipped.
//!
//! Coordinates are written in Rust's shortest round-trip decimal form, so a
//! file written here reads back to identical bits and re-serializes to
//! identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Point2;

pub fn parse_sites(text: &str) -> Result<Vec<Point2>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        if fields.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", fields.len())));
        }
        let x: f64 = fields[0]
            .parse()
            .map_err(|e| bad(format!("{:?}: {e}", fields[0])))?;
        let y: f64 = fields[1]
            .parse()
            .map_err(|e| bad(format!("{:?}: {e}", fields[1])))?;
        out.push(Point2::try_new(x, y).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

pub fn format_sites(sites: &[Point2]) -> String {
    let mut s = String::with_capacity(sites.len() * 40);
    for p in sites {
        let _ = writeln!(s, "{} {}", p.x, p.y);
    }
    s
}

pub fn read_sites(path: impl AsRef<Path>) -> Result<Vec<Point2>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sites(&text)
}

pub fn write_sites(path: impl AsRef<Path>, sites: &[Point2]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_sites(sites)).map_err(|e| Error::io(path, e))
}
