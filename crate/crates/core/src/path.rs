//! Turning a walk into a route along Delaunay edges.
//!
//! A path has one segment per step (`Z_i` to `Z_{i+1}`) and a final segment
//! from the last stopper to the terminal, which is a single vertex when the
//! two coincide.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::FRAC_PI_8;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::{ConeFrame, Point2};
use crate::walk::{SiteGraph, WalkTrace};

pub const DEFAULT_LAMBDA: f64 = 1.998;
const MAX_ESCALATIONS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub vertices: Vec<u32>,
    pub total_length: f64,
    /// `total_length / |zq|`; 1 when `z = q`.
    pub stretch: f64,
    /// Index into `vertices` of the last vertex of each segment.
    pub segment_ends: Vec<usize>,
    pub segment_lengths: Vec<f64>,
    /// Ellipse factor actually used; above the requested one after escalation.
    pub lambda: Option<f64>,
}

impl Path {
    fn assemble<G: SiteGraph + ?Sized>(t: &G, trace: &WalkTrace, segments: Vec<Vec<u32>>, lambda: Option<f64>) -> Path {
        let mut vertices = vec![trace.start];
        let mut segment_ends = Vec::with_capacity(segments.len());
        let mut segment_lengths = Vec::with_capacity(segments.len());
        for seg in segments {
            debug_assert_eq!(seg.first(), vertices.last());
            segment_lengths.push(polyline_length(t, &seg));
            vertices.extend_from_slice(&seg[1..]);
            segment_ends.push(vertices.len() - 1);
        }
        let total_length = segment_lengths.iter().sum();
        Path {
            vertices,
            total_length,
            stretch: stretch(total_length, t.site(trace.start).dist(trace.aim)),
            segment_ends,
            segment_lengths,
            lambda,
        }
    }

    /// Vertices of segment `k`, endpoints included.
    pub fn segment(&self, k: usize) -> &[u32] {
        let lo = if k == 0 { 0 } else { self.segment_ends[k - 1] };
        &self.vertices[lo..=self.segment_ends[k]]
    }
}

fn stretch(length: f64, direct: f64) -> f64 {
    if direct == 0.0 {
        1.0
    } else {
        length / direct
    }
}

fn polyline_length<G: SiteGraph + ?Sized>(t: &G, v: &[u32]) -> f64 {
    v.windows(2).map(|w| t.site(w[0]).dist(t.site(w[1]))).sum()
}

fn check_trace<G: SiteGraph + ?Sized>(t: &G, trace: &WalkTrace) -> Result<()> {
    let n = t.site_count();
    let bad = |v: u32| (v as usize) >= n;
    if bad(trace.start)
        || bad(trace.terminal)
        || trace.final_substeps.iter().any(|&v| bad(v))
        || trace
            .steps
            .iter()
            .any(|s| bad(s.from) || bad(s.stopper) || s.intermediates.iter().any(|&v| bad(v)))
    {
        return Err(Error::Inconsistent("trace refers to sites outside the triangulation".into()));
    }
    let mut anchor = trace.start;
    for s in &trace.steps {
        if s.from != anchor {
            return Err(Error::Inconsistent(format!("step {} does not start at the previous stopper", s.index)));
        }
        anchor = s.stopper;
    }
    Ok(())
}

/// Backtrack through `visited` (visiting order, anchor first) from `target`,
/// where each site's predecessor is the first earlier site adjacent to it.
fn predecessor_chain<G: SiteGraph + ?Sized>(t: &G, visited: &[u32], target: u32) -> Result<Vec<u32>> {
    let pos = |v: u32| visited.iter().position(|&u| u == v);
    let mut k = pos(target)
        .ok_or_else(|| Error::Inconsistent(format!("site {target} was not visited in its step")))?;
    let mut chain = vec![target];
    while k > 0 {
        let v = visited[k];
        k = visited[..k]
            .iter()
            .position(|&u| t.is_adjacent(u, v))
            .ok_or_else(|| Error::Inconsistent(format!("site {v} has no visited Delaunay neighbour")))?;
        chain.push(visited[k]);
    }
    chain.reverse();
    Ok(chain)
}

/// Route through the predecessor table of each step's discovery order.
pub fn simple_path<G: SiteGraph + ?Sized>(t: &G, trace: &WalkTrace) -> Result<Path> {
    check_trace(t, trace)?;
    let mut segments = Vec::with_capacity(trace.kappa + 1);
    let mut visited = Vec::new();
    for s in &trace.steps {
        visited.clear();
        visited.push(s.from);
        visited.extend_from_slice(&s.intermediates);
        visited.push(s.stopper);
        segments.push(predecessor_chain(t, &visited, s.stopper)?);
    }
    let last = trace.last_stopper();
    if trace.final_substeps.first() != Some(&last) {
        return Err(Error::Inconsistent("final step does not start at the last stopper".into()));
    }
    if trace.kappa == 0 && t.site(trace.terminal) == trace.aim && !trace.final_substeps.contains(&trace.terminal) {
        // the aim coincides with a site and the walk never ran
        segments.push(ellipse_segment(t, trace.start, trace.terminal, DEFAULT_LAMBDA)?.0);
    } else {
        segments.push(predecessor_chain(t, &trace.final_substeps, trace.terminal)?);
    }
    Ok(Path::assemble(t, trace, segments, None))
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    v: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest path from `a` to `b` using only sites `x` with
/// `|xa| + |xb| <= lambda |ab|`.
fn ellipse_dijkstra<G: SiteGraph + ?Sized>(t: &G, a: u32, b: u32, lambda: f64) -> Option<Vec<u32>> {
    if a == b {
        return Some(vec![a]);
    }
    let (pa, pb) = (t.site(a), t.site(b));
    let budget = lambda * pa.dist(pb);
    let inside = |p: Point2| p.dist(pa) + p.dist(pb) <= budget;
    let mut dist: HashMap<u32, f64> = HashMap::new();
    let mut pred: HashMap<u32, u32> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(a, 0.0);
    heap.push(Entry { dist: 0.0, v: a });
    while let Some(Entry { dist: d, v }) = heap.pop() {
        if d > dist[&v] {
            continue;
        }
        if v == b {
            let mut path = vec![b];
            let mut cur = b;
            while cur != a {
                cur = pred[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        let pv = t.site(v);
        for &w in t.adjacent(v) {
            let pw = t.site(w);
            if w != b && !inside(pw) {
                continue;
            }
            let nd = d + pv.dist(pw);
            if dist.get(&w).is_none_or(|&old| nd < old) {
                dist.insert(w, nd);
                pred.insert(w, v);
                heap.push(Entry { dist: nd, v: w });
            }
        }
    }
    None
}

/// Shortest route inside each step's ellipse. On failure `lambda` is doubled,
/// at most three times.
pub fn competitive_path<G: SiteGraph + ?Sized>(t: &G, trace: &WalkTrace, lambda: f64) -> Result<Path> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be at least 1, got {lambda}")));
    }
    check_trace(t, trace)?;
    let pairs: Vec<(u32, u32)> = trace
        .steps
        .iter()
        .map(|s| (s.from, s.stopper))
        .chain(std::iter::once((trace.last_stopper(), trace.terminal)))
        .collect();
    let mut used = lambda;
    let mut segments = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let (seg, l) = ellipse_segment(t, a, b, lambda)?;
        used = used.max(l);
        segments.push(seg);
    }
    Ok(Path::assemble(t, trace, segments, Some(used)))
}

fn ellipse_segment<G: SiteGraph + ?Sized>(t: &G, a: u32, b: u32, lambda: f64) -> Result<(Vec<u32>, f64)> {
    let mut l = lambda;
    loop {
        if let Some(seg) = ellipse_dijkstra(t, a, b, l) {
            return Ok((seg, l));
        }
        if l >= lambda * (1u32 << MAX_ESCALATIONS) as f64 {
            return Err(Error::NoPath { from: a, to: b, lambda: l });
        }
        l *= 2.0;
    }
}

/// `2 lambda cos(pi/8)`: the stretch bound for competitive paths.
pub fn competitive_bound(lambda: f64) -> f64 {
    2.0 * lambda * FRAC_PI_8.cos()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathAudit {
    pub adjacency: bool,
    pub endpoints: bool,
    pub length: bool,
    /// `None` when no bound was requested.
    pub stretch: Option<bool>,
    /// Every segment stays in its step's disc. Informational only.
    pub containment: bool,
}

impl PathAudit {
    pub fn passed(&self) -> bool {
        self.adjacency && self.endpoints && self.length && self.stretch != Some(false)
    }
}

pub fn path_audit<G: SiteGraph + ?Sized>(t: &G, p: &Path, trace: &WalkTrace, stretch_bound: Option<f64>) -> PathAudit {
    let n = t.site_count();
    let in_range = p.vertices.iter().all(|&v| (v as usize) < n);
    let adjacency = in_range && p.vertices.windows(2).all(|w| t.is_adjacent(w[0], w[1]));
    let endpoints = p.vertices.first() == Some(&trace.start) && p.vertices.last() == Some(&trace.terminal);
    let length = in_range && {
        let l = polyline_length(t, &p.vertices);
        (l - p.total_length).abs() <= 1e-9 * l.max(1e-300)
    };
    let stretch = stretch_bound.map(|b| in_range && p.stretch <= b * (1.0 + 1e-12));
    let containment = in_range
        && p.segment_ends.len() == trace.kappa + 1
        && (0..=trace.kappa).all(|k| {
            let (anchor, radius) = match trace.steps.get(k) {
                Some(s) => (s.from, s.radius),
                None => {
                    let z = trace.last_stopper();
                    (z, t.site(z).dist(trace.aim) / 2.0)
                }
            };
            let Ok(frame) = ConeFrame::new(t.site(anchor), trace.aim) else {
                return true;
            };
            let c = frame.disc_center(radius);
            p.segment(k)
                .iter()
                .all(|&v| t.site(v).dist(c) <= radius * (1.0 + 1e-9))
        });
    PathAudit {
        adjacency,
        endpoints,
        length,
        stretch,
        containment,
    }
}

/// `total_length <value>` then `vertices <i> <j> ...`.
impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "total_length {}", self.total_length)?;
        write!(f, "vertices")?;
        for v in &self.vertices {
            write!(f, " {v}")?;
        }
        writeln!(f)
    }
}

/// Parsed form of a serialized [`Path`].
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub vertices: Vec<u32>,
    pub total_length: f64,
}

impl FromStr for PathRecord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let bad = |line, msg: &str| Error::Parse { line, msg: msg.into() };
        let total_length = lines
            .next()
            .and_then(|l| l.strip_prefix("total_length "))
            .ok_or_else(|| bad(1, "expected total_length"))?
            .trim()
            .parse()
            .map_err(|_| bad(1, "bad total_length"))?;
        let rest = lines
            .next()
            .and_then(|l| l.strip_prefix("vertices"))
            .ok_or_else(|| bad(2, "expected vertices"))?;
        let vertices = rest
            .split_whitespace()
            .map(|v| v.parse().map_err(|_| bad(2, "bad vertex index")))
            .collect::<Result<Vec<u32>>>()?;
        Ok(PathRecord { vertices, total_length })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::{SiteSet, Triangulation};
    use crate::walk::{cone_walk, walk_graph, NeighborGraph, StepRecord};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_triangulation(n: usize, seed: u64) -> Triangulation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| Point2::new(rng.random::<f64>() * 30.0, rng.random::<f64>() * 30.0))
            .collect();
        Triangulation::build(SiteSet::from_points(pts).unwrap()).unwrap()
    }

    fn walk(t: &Triangulation, seed: u64) -> WalkTrace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
        loop {
            let q = Point2::new(rng.random::<f64>() * 30.0, rng.random::<f64>() * 30.0);
            if t.hull_contains(q) {
                return cone_walk(t, rng.random_range(0..t.len()), q).unwrap();
            }
        }
    }

    fn triangle() -> Triangulation {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.5, 1.0)];
        Triangulation::build(SiteSet::from_points(pts).unwrap()).unwrap()
    }

    #[test]
    fn two_site_walk() {
        let g = NeighborGraph::from_edges(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], &[(0, 1)])
            .unwrap();
        let trace = walk_graph(&g, 0, Point2::new(3.0, 0.0)).unwrap();
        let p = simple_path(&g, &trace).unwrap();
        assert_eq!(p.vertices, vec![0, 1]);
        assert_eq!(p.total_length, 1.0);
        let c = competitive_path(&g, &trace, DEFAULT_LAMBDA).unwrap();
        assert_eq!(c.vertices, p.vertices);
        assert!(c.stretch <= competitive_bound(DEFAULT_LAMBDA));
    }

    #[test]
    fn direct_neighbour_step() {
        let t = triangle();
        let trace = cone_walk(&t, 0, Point2::new(0.9, 0.05)).unwrap();
        let p = simple_path(&t, &trace).unwrap();
        assert_eq!(p.vertices.first(), Some(&0));
        assert_eq!(p.vertices.last(), Some(&trace.terminal));
        for k in 0..trace.kappa {
            assert_eq!(p.segment(k), &[trace.steps[k].from, trace.steps[k].stopper]);
        }
        let c = competitive_path(&t, &trace, DEFAULT_LAMBDA).unwrap();
        assert_eq!(c.vertices, p.vertices);
    }

    #[test]
    fn predecessor_is_first_adjacent_visit() {
        // 0 -> 1 -> 2 along a chain: 2 is only adjacent to 1
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.5),
            Point2::new(4.0, 0.0),
            Point2::new(2.0, -0.5),
        ];
        let t = Triangulation::build(SiteSet::from_points(pts).unwrap()).unwrap();
        assert!(!t.are_adjacent(0, 2));
        let chain = predecessor_chain(&t, &[0, 1, 2], 2).unwrap();
        assert_eq!(chain, vec![0, 1, 2]);
        assert!(matches!(predecessor_chain(&t, &[0, 1], 2), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn mismatched_trace_is_rejected() {
        let t = triangle();
        let mut trace = cone_walk(&t, 0, Point2::new(0.9, 0.05)).unwrap();
        trace.steps.push(StepRecord {
            index: 9,
            from: 7,
            stopper: 1,
            radius: 1.0,
            angle: 0.0,
            intermediates: vec![],
            accessed_count: 0,
            distance_to_aim: 1.0,
        });
        assert!(matches!(simple_path(&t, &trace), Err(Error::Inconsistent(_))));
        assert!(matches!(competitive_path(&t, &trace, 2.0), Err(Error::Inconsistent(_))));
        assert!(matches!(competitive_path(&t, &trace, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn audits_on_a_thousand_sites() {
        let t = random_triangulation(1000, 1);
        let bound = competitive_bound(DEFAULT_LAMBDA);
        for seed in 0..50 {
            let trace = walk(&t, seed);
            let s = simple_path(&t, &trace).unwrap_or_else(|e| panic!("{e} {trace:?}"));
            let a = path_audit(&t, &s, &trace, None);
            assert!(a.passed() && a.containment, "{a:?}");
            let c = competitive_path(&t, &trace, DEFAULT_LAMBDA).unwrap();
            let a = path_audit(&t, &c, &trace, Some(bound));
            assert!(a.passed(), "{a:?}");
            assert_eq!(c.lambda, Some(DEFAULT_LAMBDA));
            for k in 0..=trace.kappa {
                let seg = c.segment(k);
                let (pa, pb) = (t.point(seg[0]), t.point(*seg.last().unwrap()));
                let d = pa.dist(pb);
                assert!(c.segment_lengths[k] <= DEFAULT_LAMBDA * d + 1e-9);
                for &v in seg {
                    let p = t.point(v);
                    assert!(p.dist(pa) + p.dist(pb) <= DEFAULT_LAMBDA * d + 1e-9);
                }
                // Dijkstra never loses to the discovery route when that route
                // fits in the ellipse
                let sk = s.segment(k);
                if sk.iter().all(|&v| t.point(v).dist(pa) + t.point(v).dist(pb) <= DEFAULT_LAMBDA * d) {
                    assert!(c.segment_lengths[k] <= s.segment_lengths[k] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn aim_on_a_site_routes_to_it() {
        let t = random_triangulation(300, 9);
        let trace = cone_walk(&t, 4, t.point(200)).unwrap();
        assert_eq!((trace.kappa, trace.terminal), (0, 200));
        for p in [simple_path(&t, &trace).unwrap(), competitive_path(&t, &trace, DEFAULT_LAMBDA).unwrap()] {
            assert!(path_audit(&t, &p, &trace, Some(competitive_bound(DEFAULT_LAMBDA))).passed());
        }
    }

    #[test]
    fn injected_non_edge_fails_adjacency() {
        let t = random_triangulation(300, 2);
        let trace = walk(&t, 3);
        let mut p = simple_path(&t, &trace).unwrap();
        let far = (0..t.len() as u32)
            .find(|&v| v != p.vertices[0] && !t.are_adjacent(p.vertices[0], v))
            .unwrap();
        p.vertices.insert(1, far);
        let a = path_audit(&t, &p, &trace, None);
        assert!(!a.adjacency);
        assert!(!a.passed());
    }

    #[test]
    fn serialization_round_trip() {
        let t = random_triangulation(200, 4);
        let trace = walk(&t, 5);
        let p = simple_path(&t, &trace).unwrap();
        let rec: PathRecord = p.to_string().parse().unwrap();
        assert_eq!(rec.vertices, p.vertices);
        assert_eq!(rec.total_length, p.total_length);
        assert!("vertices 1 2\n".parse::<PathRecord>().is_err());
    }

    #[test]
    fn tiny_lambda_escalates() {
        let t = random_triangulation(400, 6);
        let trace = walk(&t, 7);
        if let Ok(p) = competitive_path(&t, &trace, 1.0) {
            assert!(p.lambda.unwrap() >= 1.0);
            assert!(path_audit(&t, &p, &trace, None).passed());
        }
    }
}
