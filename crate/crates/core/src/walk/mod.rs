//! The cone walk.
//!
//! Each step grows `Cone(Z_i, q, r)` from `r = 0` until it meets a site, the
//! stopper, which anchors the next step. Sites met by the growing disc but
//! outside the cone are intermediates; their Delaunay neighbours feed the
//! candidate queue. The walk ends when the disc reaches `q` first.
//!
//! Candidates live in a binary heap keyed by disc radius. Entries for sites
//! that have since been visited are skipped when popped.

mod lemmata;
mod oracle;
mod text;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::delaunay::{Location, Triangulation};
use crate::error::{Error, Result};
use crate::geom::{ConeFrame, Point2};

pub use lemmata::{check_step_lemmata, LemmaKind, LemmaViolation};
pub use oracle::{oracle_walk, step_oracle, OracleStep};
pub use text::{TraceDocument, TraceRow};

/// Read access to site positions and their Delaunay neighbours.
pub trait SiteGraph {
    fn site_count(&self) -> usize;
    fn site(&self, v: u32) -> Point2;
    /// Neighbours of `v` in ascending index order.
    fn adjacent(&self, v: u32) -> &[u32];

    fn is_adjacent(&self, u: u32, v: u32) -> bool {
        self.adjacent(u).binary_search(&v).is_ok()
    }
}

impl SiteGraph for Triangulation {
    fn site_count(&self) -> usize {
        self.len()
    }

    #[inline]
    fn site(&self, v: u32) -> Point2 {
        self.point(v)
    }

    #[inline]
    fn adjacent(&self, v: u32) -> &[u32] {
        Triangulation::adjacent(self, v)
    }
}

/// Explicit adjacency lists, for walking graphs too small to triangulate.
#[derive(Clone, Debug, Default)]
pub struct NeighborGraph {
    points: Vec<Point2>,
    adjacency: Vec<Vec<u32>>,
}

impl NeighborGraph {
    pub fn from_edges(points: Vec<Point2>, edges: &[(u32, u32)]) -> Result<Self> {
        let n = points.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            for v in [a, b] {
                if v as usize >= n {
                    return Err(Error::Index {
                        index: v as usize,
                        len: n,
                    });
                }
            }
            if a != b {
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(NeighborGraph { points, adjacency })
    }
}

impl SiteGraph for NeighborGraph {
    fn site_count(&self) -> usize {
        self.points.len()
    }

    fn site(&self, v: u32) -> Point2 {
        self.points[v as usize]
    }

    fn adjacent(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }
}

/// One step of a walk, from anchor `Z_i` to stopper `Z_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub index: usize,
    pub from: u32,
    pub stopper: u32,
    /// `R_i`: the stopper lies on the boundary of `Cone(Z_i, q, R_i)`.
    pub radius: f64,
    /// Signed angle from `Z_i q` to `Z_i Z_{i+1}`, counter-clockwise positive.
    pub angle: f64,
    /// Sites visited inside the disc but outside the cone, in visiting order.
    pub intermediates: Vec<u32>,
    /// Candidate insertions during this step, with multiplicity.
    pub accessed_count: usize,
    /// `L_i = |Z_i q|`.
    pub distance_to_aim: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrace {
    pub start: u32,
    pub aim: Point2,
    pub steps: Vec<StepRecord>,
    /// Sites visited by the last, unfinished step (anchor first). The
    /// terminal is chosen among these.
    pub final_substeps: Vec<u32>,
    pub final_accessed: usize,
    pub terminal: u32,
    pub kappa: usize,
    /// `K = kappa + 1 + sum of intermediates`.
    pub visited_count: usize,
    /// Candidate insertions over the whole walk, with multiplicity.
    pub accessed_total: usize,
    /// Largest number of sites visited in a single step.
    pub neighborhoods_used: usize,
    /// Set when the terminal had to be replaced because the first choice was
    /// not a Delaunay neighbour of the aim.
    pub terminal_fallback: bool,
}

impl WalkTrace {
    /// Stoppers `Z_0 .. Z_kappa`.
    pub fn stoppers(&self) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.kappa + 1);
        v.push(self.start);
        v.extend(self.steps.iter().map(|s| s.stopper));
        v
    }

    /// The last stopper `Z_kappa`.
    pub fn last_stopper(&self) -> u32 {
        self.steps.last().map_or(self.start, |s| s.stopper)
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    radius: f64,
    site: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // reversed: BinaryHeap pops the smallest radius, then the lowest index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .radius
            .total_cmp(&self.radius)
            .then_with(|| other.site.cmp(&self.site))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cone walk from site `z` toward `q` on a triangulation.
///
/// `q` must lie in the convex hull of the sites. If `q` is a site the walk
/// returns at once with that site as terminal and no steps. In debug builds the terminal
/// is checked against the simulated insertion of `q`.
pub fn cone_walk(t: &Triangulation, z: usize, q: Point2) -> Result<WalkTrace> {
    let z = t.check_index(z)?;
    if !q.is_finite() {
        return Err(Error::Domain(format!("non-finite aim {q}")));
    }
    if !t.hull_contains(q) {
        return Err(Error::OutsideHull { x: q.x, y: q.y });
    }
    if let Location::Vertex(s) = t.locate(q, Some(z)) {
        // the aim is a site: it is its own nearest neighbour
        return Ok(finish(z, q, Vec::new(), vec![z], 0, s));
    }
    let mut trace = walk_graph(t, z, q)?;
    if cfg!(debug_assertions) {
        ensure_terminal_neighbor(t, &mut trace)?;
    }
    Ok(trace)
}

/// Checks that the terminal is a Delaunay neighbour of the aim in
/// `DT(X + {q})`; if not, substitutes the first visited site of the final
/// step that is and flags the trace.
pub fn ensure_terminal_neighbor(t: &Triangulation, trace: &mut WalkTrace) -> Result<()> {
    let nbrs = t.neighbors_of_query_from(trace.aim, Some(trace.terminal))?;
    if nbrs.binary_search(&trace.terminal).is_ok() {
        return Ok(());
    }
    let replacement = trace
        .final_substeps
        .iter()
        .copied()
        .find(|v| nbrs.binary_search(v).is_ok())
        .ok_or_else(|| {
            Error::Inconsistent(format!(
                "no site of the final disc is a neighbour of {}",
                trace.aim
            ))
        })?;
    trace.terminal = replacement;
    trace.terminal_fallback = true;
    Ok(())
}

/// Cone walk over any [`SiteGraph`]. No hull check is made.
pub fn walk_graph<G: SiteGraph + ?Sized>(g: &G, z: u32, q: Point2) -> Result<WalkTrace> {
    if z as usize >= g.site_count() {
        return Err(Error::Index {
            index: z as usize,
            len: g.site_count(),
        });
    }
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::new();
    let mut substeps: Vec<u32> = Vec::new();
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut anchor = z;

    loop {
        let za = g.site(anchor);
        if za == q {
            // the aim is a site and we are standing on it
            return Ok(finish(z, q, steps, vec![anchor], 0, anchor));
        }
        let frame = ConeFrame::new(za, q)?;
        let aim_radius = za.dist(q) / 2.0;
        heap.clear();
        substeps.clear();
        substeps.push(anchor);
        let mut accessed = expand(g, &frame, anchor, &substeps, &mut heap);

        let stopper = loop {
            while heap.peek().is_some_and(|c| substeps.contains(&c.site)) {
                heap.pop();
            }
            match heap.peek() {
                Some(c) if c.radius <= aim_radius => {}
                _ => break None,
            }
            let c = heap.pop().expect("peeked");
            let p = g.site(c.site);
            let d = p - za;
            if frame.in_cone_unchecked(d.dot(frame.axis()), d.norm2()) {
                break Some(c);
            }
            substeps.push(c.site);
            accessed += expand(g, &frame, c.site, &substeps, &mut heap);
        };

        match stopper {
            Some(c) => {
                steps.push(StepRecord {
                    index: steps.len(),
                    from: anchor,
                    stopper: c.site,
                    radius: c.radius,
                    angle: frame.signed_angle(g.site(c.site)),
                    intermediates: substeps[1..].to_vec(),
                    accessed_count: accessed,
                    distance_to_aim: za.dist(q),
                });
                anchor = c.site;
            }
            None => {
                let back = ConeFrame::new(q, za)?;
                let terminal = substeps
                    .iter()
                    .copied()
                    .min_by(|&a, &b| {
                        back.radius_key(g.site(a))
                            .total_cmp(&back.radius_key(g.site(b)))
                            .then(a.cmp(&b))
                    })
                    .expect("substeps holds the anchor");
                return Ok(finish(z, q, steps, substeps.clone(), accessed, terminal));
            }
        }
    }
}

fn expand<G: SiteGraph + ?Sized>(
    g: &G,
    frame: &ConeFrame,
    v: u32,
    substeps: &[u32],
    heap: &mut BinaryHeap<Candidate>,
) -> usize {
    let mut inserted = 0;
    for &nb in g.adjacent(v) {
        if substeps.contains(&nb) {
            continue;
        }
        inserted += 1;
        let radius = frame.radius_key(g.site(nb));
        if radius.is_finite() {
            heap.push(Candidate { radius, site: nb });
        }
    }
    inserted
}

fn finish(
    start: u32,
    aim: Point2,
    steps: Vec<StepRecord>,
    final_substeps: Vec<u32>,
    final_accessed: usize,
    terminal: u32,
) -> WalkTrace {
    let kappa = steps.len();
    let intermediates: usize = steps.iter().map(|s| s.intermediates.len()).sum();
    let accessed_total = steps.iter().map(|s| s.accessed_count).sum::<usize>() + final_accessed;
    let neighborhoods_used = steps
        .iter()
        .map(|s| s.intermediates.len() + 2)
        .chain(std::iter::once(final_substeps.len()))
        .max()
        .unwrap_or(1);
    WalkTrace {
        start,
        aim,
        steps,
        final_substeps,
        final_accessed,
        terminal,
        kappa,
        visited_count: kappa + 1 + intermediates,
        accessed_total,
        neighborhoods_used,
        terminal_fallback: false,
    }
}

#[cfg(test)]
mod tests;
