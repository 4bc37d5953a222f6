//! Full-scan reference for a single walk step. Ignores adjacency entirely,
//! so agreement with the engine shows the neighbour-driven search finds
//! every site inside each disc.

use crate::error::{Error, Result};
use crate::geom::{ConeFrame, Point2};

use super::SiteGraph;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleStep {
    Stopper {
        stopper: u32,
        radius: f64,
        /// Sites with a smaller disc radius than the stopper, by radius.
        intermediates: Vec<u32>,
    },
    /// The disc reaches `q` before any cone site.
    Terminal { intermediates: Vec<u32> },
}

/// One step from `anchor` toward `q` by scanning every site.
pub fn step_oracle<G: SiteGraph + ?Sized>(g: &G, anchor: u32, q: Point2) -> Result<OracleStep> {
    let n = g.site_count();
    if anchor as usize >= n {
        return Err(Error::Index {
            index: anchor as usize,
            len: n,
        });
    }
    let za = g.site(anchor);
    if za == q {
        return Ok(OracleStep::Terminal {
            intermediates: Vec::new(),
        });
    }
    let frame = ConeFrame::new(za, q)?;
    let aim_radius = za.dist(q) / 2.0;

    let mut reachable: Vec<(f64, u32)> = (0..n as u32)
        .filter(|&v| v != anchor)
        .filter_map(|v| frame.min_disc_radius(g.site(v)).value().map(|r| (r, v)))
        .collect();
    reachable.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let stopper = reachable
        .iter()
        .copied()
        .find(|&(_, v)| frame.in_cone(g.site(v)).unwrap_or(false));
    match stopper {
        Some((radius, stopper)) if radius <= aim_radius => {
            let intermediates = reachable
                .iter()
                .take_while(|&&(r, v)| (r, v) != (radius, stopper))
                .map(|&(_, v)| v)
                .collect();
            Ok(OracleStep::Stopper {
                stopper,
                radius,
                intermediates,
            })
        }
        _ => Ok(OracleStep::Terminal {
            intermediates: reachable
                .iter()
                .take_while(|&&(r, _)| r <= aim_radius)
                .map(|&(_, v)| v)
                .collect(),
        }),
    }
}

/// Chains [`step_oracle`] from `z` until the terminal condition.
pub fn oracle_walk<G: SiteGraph + ?Sized>(g: &G, z: u32, q: Point2) -> Result<Vec<OracleStep>> {
    let mut out = Vec::new();
    let mut anchor = z;
    loop {
        let step = step_oracle(g, anchor, q)?;
        match step {
            OracleStep::Stopper { stopper, .. } => {
                anchor = stopper;
                out.push(step);
            }
            OracleStep::Terminal { .. } => {
                out.push(step);
                return Ok(out);
            }
        }
    }
}
