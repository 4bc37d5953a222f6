use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("need at least 3 sites, got {0}")]
    TooFewSites(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("site index {index} out of range (n = {len})")]
    Index { index: usize, len: usize },

    #[error("point ({x}, {y}) lies outside the convex hull of the sites")]
    OutsideHull { x: f64, y: f64 },

    #[error("trace does not match triangulation: {0}")]
    Inconsistent(String),

    #[error("no path between sites {from} and {to} inside the ellipse (lambda = {lambda})")]
    NoPath { from: u32, to: u32, lambda: f64 },

    #[error("walk did not terminate within {0} hops")]
    Diverged(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
