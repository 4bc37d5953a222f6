//! Plain-text trace documents.
//!
//! ```text
//! z 0
//! q 1 0
//! kappa 1
//! K 2
//! accessed_total 1
//! terminal 1
//! i Z_i Z_i+1 R_i alpha_i intermediates L_i
//! 0 0 1 0.5 0 0 1
//! ```
//!
//! Floats use shortest round-trip form, so parsing and re-printing is exact.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::Point2;

use super::WalkTrace;

const COLUMNS: &str = "i Z_i Z_i+1 R_i alpha_i intermediates L_i";

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub index: usize,
    pub from: u32,
    pub stopper: u32,
    pub radius: f64,
    pub angle: f64,
    pub intermediates: usize,
    pub distance_to_aim: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceDocument {
    pub start: u32,
    pub aim: Point2,
    pub kappa: usize,
    pub visited_count: usize,
    pub accessed_total: usize,
    pub terminal: u32,
    pub rows: Vec<TraceRow>,
}

impl From<&WalkTrace> for TraceDocument {
    fn from(t: &WalkTrace) -> Self {
        TraceDocument {
            start: t.start,
            aim: t.aim,
            kappa: t.kappa,
            visited_count: t.visited_count,
            accessed_total: t.accessed_total,
            terminal: t.terminal,
            rows: t
                .steps
                .iter()
                .map(|s| TraceRow {
                    index: s.index,
                    from: s.from,
                    stopper: s.stopper,
                    radius: s.radius,
                    angle: s.angle,
                    intermediates: s.intermediates.len(),
                    distance_to_aim: s.distance_to_aim,
                })
                .collect(),
        }
    }
}

impl fmt::Display for TraceDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "z {}", self.start)?;
        writeln!(f, "q {} {}", self.aim.x, self.aim.y)?;
        writeln!(f, "kappa {}", self.kappa)?;
        writeln!(f, "K {}", self.visited_count)?;
        writeln!(f, "accessed_total {}", self.accessed_total)?;
        writeln!(f, "terminal {}", self.terminal)?;
        writeln!(f, "{COLUMNS}")?;
        for r in &self.rows {
            writeln!(
                f,
                "{} {} {} {} {} {} {}",
                r.index, r.from, r.stopper, r.radius, r.angle, r.intermediates, r.distance_to_aim
            )?;
        }
        Ok(())
    }
}

fn field<T: FromStr>(line: usize, s: Option<&str>, what: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    let s = s.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    s.parse().map_err(|e| Error::Parse {
        line,
        msg: format!("{what} {s:?}: {e}"),
    })
}

impl FromStr for TraceDocument {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut header = |key: &str| -> Result<(usize, Vec<&str>)> {
            let (n, l) = lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("missing {key} line"),
            })?;
            let mut it = l.split_whitespace();
            if it.next() != Some(key) {
                return Err(Error::Parse {
                    line: n,
                    msg: format!("expected {key}"),
                });
            }
            Ok((n, it.collect()))
        };
        let (n, v) = header("z")?;
        let start = field(n, v.first().copied(), "z")?;
        let (n, v) = header("q")?;
        let aim = Point2::try_new(field(n, v.first().copied(), "q.x")?, field(n, v.get(1).copied(), "q.y")?)
            .map_err(|e| Error::Parse {
                line: n,
                msg: e.to_string(),
            })?;
        let (n, v) = header("kappa")?;
        let kappa = field(n, v.first().copied(), "kappa")?;
        let (n, v) = header("K")?;
        let visited_count = field(n, v.first().copied(), "K")?;
        let (n, v) = header("accessed_total")?;
        let accessed_total = field(n, v.first().copied(), "accessed_total")?;
        let (n, v) = header("terminal")?;
        let terminal = field(n, v.first().copied(), "terminal")?;
        match lines.next() {
            Some((_, l)) if l.split_whitespace().eq(COLUMNS.split_whitespace()) => {}
            Some((n, _)) => {
                return Err(Error::Parse {
                    line: n,
                    msg: "expected column header".into(),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 0,
                    msg: "missing column header".into(),
                })
            }
        }
        let mut rows = Vec::new();
        for (n, l) in lines {
            if l.is_empty() {
                continue;
            }
            let mut it = l.split_whitespace();
            rows.push(TraceRow {
                index: field(n, it.next(), "i")?,
                from: field(n, it.next(), "Z_i")?,
                stopper: field(n, it.next(), "Z_i+1")?,
                radius: field(n, it.next(), "R_i")?,
                angle: field(n, it.next(), "alpha_i")?,
                intermediates: field(n, it.next(), "intermediates")?,
                distance_to_aim: field(n, it.next(), "L_i")?,
            });
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: n,
                    msg: "trailing fields".into(),
                });
            }
        }
        if rows.len() != kappa {
            return Err(Error::Inconsistent(format!(
                "kappa is {kappa} but {} step rows follow",
                rows.len()
            )));
        }
        Ok(TraceDocument {
            start,
            aim,
            kappa,
            visited_count,
            accessed_total,
            terminal,
            rows,
        })
    }
}
