//! Reference navigation: straight walk, greedy walk, compass routing.

use std::fmt;
use std::str::FromStr;

use crate::delaunay::Triangulation;
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::predicates::orient;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Baseline {
    Straight,
    Greedy,
    Compass,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Straight, Baseline::Greedy, Baseline::Compass];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Straight => "straight",
            Baseline::Greedy => "greedy",
            Baseline::Compass => "compass",
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Baseline::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown baseline {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineResult {
    pub algorithm: Baseline,
    /// Triangles for the straight walk, sites for the others.
    pub sequence: Vec<u32>,
    pub hop_count: usize,
    /// Length travelled: `|zq|` for the straight walk, the edge sum otherwise.
    pub total_length: f64,
    pub terminated: bool,
    /// Last site for the vertex walks.
    pub terminal: Option<u32>,
}

fn check(t: &Triangulation, z: usize, q: Point2) -> Result<u32> {
    let z = t.check_index(z)?;
    if !q.is_finite() {
        return Err(Error::Domain(format!("non-finite aim {q}")));
    }
    if !t.hull_contains(q) {
        return Err(Error::OutsideHull { x: q.x, y: q.y });
    }
    Ok(z)
}

fn vertex_result(t: &Triangulation, algorithm: Baseline, sequence: Vec<u32>) -> BaselineResult {
    let total_length = sequence.windows(2).map(|w| t.point(w[0]).dist(t.point(w[1]))).sum();
    BaselineResult {
        algorithm,
        hop_count: sequence.len() - 1,
        total_length,
        terminated: true,
        terminal: sequence.last().copied(),
        sequence,
    }
}

fn contains(t: &Triangulation, tri: u32, q: Point2) -> bool {
    let v = t.triangles()[tri as usize].map(|s| t.point(s));
    (0..3).all(|k| orient(v[(k + 1) % 3], v[(k + 2) % 3], q) >= 0.0)
}

/// Triangles crossed by segment `zq`, from one incident to `z` to one
/// containing `q`. A segment through a site other than `z` is degenerate.
pub fn straight_walk(t: &Triangulation, z: usize, q: Point2) -> Result<BaselineResult> {
    let z = check(t, z, q)?;
    let pz = t.point(z);
    let result = |sequence: Vec<u32>| BaselineResult {
        algorithm: Baseline::Straight,
        hop_count: sequence.len() - 1,
        total_length: pz.dist(q),
        terminated: true,
        terminal: None,
        sequence,
    };
    let star = t.star(z);
    if let Some(&tri) = star.iter().find(|&&tri| contains(t, tri, q)) {
        return Ok(result(vec![tri]));
    }
    let degenerate = || Error::Degenerate(format!("segment {pz} -> {q} passes through a site"));
    // the triangle of the star whose wedge at z holds the direction of q
    let mut cur = None;
    for &tri in &star {
        let v = t.triangles()[tri as usize];
        let k = v.iter().position(|&s| s == z).expect("star triangle holds z");
        let (a, b) = (t.point(v[(k + 1) % 3]), t.point(v[(k + 2) % 3]));
        let (oa, ob) = (orient(pz, a, q), orient(pz, b, q));
        if oa > 0.0 && ob < 0.0 {
            cur = Some((tri, k));
            break;
        }
        if (oa == 0.0 && a.dot(q - pz) > pz.dot(q - pz)) || (ob == 0.0 && b.dot(q - pz) > pz.dot(q - pz)) {
            return Err(degenerate());
        }
    }
    let (mut tri, mut exit) = cur.ok_or_else(degenerate)?;
    let mut sequence = vec![tri];
    let limit = t.triangles().len() + 1;
    loop {
        // leave through the edge opposite corner `exit`
        tri = t
            .triangle_across(tri, exit)
            .ok_or_else(|| Error::Inconsistent(format!("straight walk left the hull toward {q}")))?;
        sequence.push(tri);
        if contains(t, tri, q) {
            return Ok(result(sequence));
        }
        if sequence.len() > limit {
            return Err(Error::Diverged(sequence.len()));
        }
        // the corner not on the entry edge decides which side the line leaves by
        let v = t.triangles()[tri as usize];
        let prev = sequence[sequence.len() - 2];
        let k = (0..3)
            .find(|&k| t.triangle_across(tri, k) == Some(prev))
            .ok_or_else(|| Error::Inconsistent("adjacency is not symmetric".into()))?;
        let o = orient(pz, q, t.point(v[k]));
        if o == 0.0 {
            return Err(degenerate());
        }
        // apex left of the line: exit across the edge with the apex and the right corner
        exit = if o > 0.0 {
            (0..3).find(|&j| j != k && orient(pz, q, t.point(v[j])) < 0.0).map(|j| 3 - k - j)
        } else {
            (0..3).find(|&j| j != k && orient(pz, q, t.point(v[j])) > 0.0).map(|j| 3 - k - j)
        }
        .ok_or_else(|| Error::Inconsistent("entry edge does not straddle the segment".into()))?;
    }
}

/// Moves to the neighbour closest to `q` while that strictly improves.
pub fn greedy_walk(t: &Triangulation, z: usize, q: Point2) -> Result<BaselineResult> {
    let mut v = check(t, z, q)?;
    let mut seq = vec![v];
    loop {
        let dv = t.point(v).dist2(q);
        let best = t
            .adjacent(v)
            .iter()
            .map(|&w| (t.point(w).dist2(q), w))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match best {
            Some((d, w)) if d < dv => {
                v = w;
                seq.push(v);
            }
            _ => return Ok(vertex_result(t, Baseline::Greedy, seq)),
        }
    }
}

/// Moves to the neighbour `x` minimising the angle between `vq` and `vx`
/// until `v` is a Delaunay neighbour of `q`. Fails after `10 n` hops.
pub fn compass_walk(t: &Triangulation, z: usize, q: Point2) -> Result<BaselineResult> {
    let mut v = check(t, z, q)?;
    let target = t.neighbors_of_query_from(q, Some(v))?;
    let limit = 10 * t.len();
    let mut seq = vec![v];
    while target.binary_search(&v).is_err() {
        if seq.len() > limit {
            return Err(Error::Diverged(seq.len() - 1));
        }
        let pv = t.point(v);
        let d = q - pv;
        v = t
            .adjacent(v)
            .iter()
            .map(|&w| {
                let e = t.point(w) - pv;
                (d.cross(e).atan2(d.dot(e)).abs(), w)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, w)| w)
            .ok_or_else(|| Error::Inconsistent(format!("site {v} has no neighbours")))?;
        seq.push(v);
    }
    Ok(vertex_result(t, Baseline::Compass, seq))
}

pub fn run_baseline(t: &Triangulation, which: Baseline, z: usize, q: Point2) -> Result<BaselineResult> {
    match which {
        Baseline::Straight => straight_walk(t, z, q),
        Baseline::Greedy => greedy_walk(t, z, q),
        Baseline::Compass => compass_walk(t, z, q),
    }
}
