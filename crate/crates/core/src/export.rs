//! CSV and sample-file output.
//!
//! Numbers use shortest round-trip formatting and rows follow walk order,
//! so equal runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::WalkOutcome;
use crate::stats::StatsTable;

pub const STATS_HEADER: &str = "stat,empirical,theory,n,walks,seed";
pub const WALKS_HEADER: &str = "walk_id,L0,kappa,K,accessed,lambda_simple,lambda_competitive,stretch";
pub const SAMPLES_HEADER: &str = "R,alpha";
pub const BASELINES_HEADER: &str = "walk_id,algorithm,hops,length,terminated";

pub const STATS_FILE: &str = "stats.csv";
pub const WALKS_FILE: &str = "walks.csv";
pub const SAMPLES_FILE: &str = "samples.csv";
pub const BASELINES_FILE: &str = "baselines.csv";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn stats_csv(table: &StatsTable) -> String {
    let mut s = format!("{STATS_HEADER}\n");
    for (name, value, theory) in table.rows() {
        let _ = writeln!(
            s,
            "{name},{value},{},{},{},{}",
            opt(theory),
            table.n,
            table.walks,
            table.seed
        );
    }
    s
}

/// `lambda_*` are path lengths; `stretch` is the competitive path's
/// length over `L0`.
pub fn walks_csv(walks: &[WalkOutcome]) -> String {
    let mut s = format!("{WALKS_HEADER}\n");
    for w in walks {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            w.walk_id,
            w.l0,
            w.kappa,
            w.visited,
            w.accessed,
            opt(w.simple_length),
            opt(w.competitive_length),
            opt(w.competitive_stretch)
        );
    }
    s
}

pub fn samples_csv(walks: &[WalkOutcome]) -> String {
    let mut s = format!("{SAMPLES_HEADER}\n");
    for (r, a) in walks.iter().flat_map(|w| &w.samples) {
        let _ = writeln!(s, "{r},{a}");
    }
    s
}

pub fn baselines_csv(walks: &[WalkOutcome]) -> String {
    let mut s = format!("{BASELINES_HEADER}\n");
    for w in walks {
        for b in &w.baselines {
            let _ = writeln!(s, "{},{},{},{},{}", w.walk_id, b.algorithm, b.hops, b.length, b.terminated);
        }
    }
    s
}

fn write(dir: &Path, name: &str, body: String) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the stats CSV, and when `walks` is non-empty the per-walk CSV,
/// the raw `(R, alpha)` samples and, if any baseline ran, the baseline CSV.
pub fn export(dir: impl AsRef<Path>, table: &StatsTable, walks: &[WalkOutcome]) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = vec![write(dir, STATS_FILE, stats_csv(table))?];
    if !walks.is_empty() {
        out.push(write(dir, WALKS_FILE, walks_csv(walks))?);
        out.push(write(dir, SAMPLES_FILE, samples_csv(walks))?);
        if walks.iter().any(|w| !w.baselines.is_empty()) {
            out.push(write(dir, BASELINES_FILE, baselines_csv(walks))?);
        }
    }
    Ok(out)
}
