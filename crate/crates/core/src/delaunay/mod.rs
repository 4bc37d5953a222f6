//! Delaunay triangulation of a site set, adjacency queries, simulated
//! insertion of a query point and a brute-force validator.

mod build;
pub mod io;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::predicates::{incircle, orient};

pub(crate) use build::NONE;

/// Disc of area `n` centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscDomain {
    pub area: f64,
}

impl DiscDomain {
    pub fn with_area(area: f64) -> Self {
        DiscDomain { area }
    }

    pub fn radius(&self) -> f64 {
        (self.area / PI).sqrt()
    }

    /// Distance from `p` to the domain boundary; negative outside.
    pub fn depth(&self, p: Point2) -> f64 {
        self.radius() - p.norm()
    }
}

/// Sites of a triangulation together with the domain they were drawn in.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteSet {
    sites: Vec<Point2>,
    domain: DiscDomain,
}

impl SiteSet {
    pub fn new(sites: Vec<Point2>, domain: DiscDomain) -> Result<Self> {
        if let Some(p) = sites.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("non-finite site {p}")));
        }
        if sites.len() > u32::MAX as usize - 1 {
            return Err(Error::Domain("too many sites".into()));
        }
        Ok(SiteSet { sites, domain })
    }

    /// Sites in a domain of area equal to the number of sites.
    pub fn from_points(sites: Vec<Point2>) -> Result<Self> {
        let area = sites.len() as f64;
        SiteSet::new(sites, DiscDomain::with_area(area))
    }

    /// Copy with each coordinate moved by at most `1e-9` times the domain
    /// radius. Breaks exact collinearity and cocircularity in crafted inputs.
    pub fn jittered(&self, seed: u64) -> SiteSet {
        let eps = 1e-9 * self.domain.radius().max(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sites = self
            .sites
            .iter()
            .map(|p| {
                Point2::new(
                    p.x + rng.random_range(-eps..=eps),
                    p.y + rng.random_range(-eps..=eps),
                )
            })
            .collect();
        SiteSet {
            sites,
            domain: self.domain,
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.sites
    }

    pub fn domain(&self) -> DiscDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Where a point falls in a triangulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Inside or on the boundary of a triangle.
    Triangle(u32),
    /// Coincides with a site.
    Vertex(u32),
    Outside,
}

/// Immutable Delaunay triangulation.
#[derive(Clone, Debug)]
pub struct Triangulation {
    sites: SiteSet,
    triangles: Vec<[u32; 3]>,
    adjacency: Vec<[u32; 3]>,
    vertex_triangle: Vec<u32>,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    hull: Vec<u32>,
}

impl Triangulation {
    /// Builds the Delaunay triangulation by incremental insertion.
    pub fn build(sites: SiteSet) -> Result<Self> {
        let mesh = build::triangulate(sites.points())?;
        Ok(Self::assemble(sites, mesh.triangles, mesh.adjacency, mesh.hull))
    }

    /// Wraps an explicit triangle list (any orientation) without checking the
    /// empty-circle property. Used to construct non-Delaunay inputs.
    pub fn from_triangles(sites: SiteSet, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let n = sites.len();
        let pts = sites.points();
        let mut tris = Vec::with_capacity(triangles.len());
        for t in triangles {
            if let Some(&v) = t.iter().find(|&&v| v as usize >= n) {
                return Err(Error::Index {
                    index: v as usize,
                    len: n,
                });
            }
            let [a, b, c] = t;
            let o = orient(pts[a as usize], pts[b as usize], pts[c as usize]);
            if o == 0.0 {
                return Err(Error::Degenerate(format!("flat triangle {a} {b} {c}")));
            }
            tris.push(if o > 0.0 { [a, b, c] } else { [a, c, b] });
        }
        let adjacency = build::adjacency_of(&tris)?;
        let hull = hull_from_boundary(&tris, &adjacency)?;
        Ok(Self::assemble(sites, tris, adjacency, hull))
    }

    fn assemble(
        sites: SiteSet,
        triangles: Vec<[u32; 3]>,
        adjacency: Vec<[u32; 3]>,
        hull: Vec<u32>,
    ) -> Self {
        let n = sites.len();
        let mut vertex_triangle = vec![NONE; n];
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(triangles.len() * 6);
        for (t, v) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                if vertex_triangle[a as usize] == NONE {
                    vertex_triangle[a as usize] = t as u32;
                }
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0u32; n + 1];
        for &(a, _) in &pairs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = pairs.into_iter().map(|(_, b)| b).collect();
        Triangulation {
            sites,
            triangles,
            adjacency,
            vertex_triangle,
            offsets,
            neighbors,
            hull,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &SiteSet {
        &self.sites
    }

    pub fn points(&self) -> &[Point2] {
        self.sites.points()
    }

    #[inline]
    pub fn point(&self, v: u32) -> Point2 {
        self.sites.points()[v as usize]
    }

    pub fn check_index(&self, v: usize) -> Result<u32> {
        if v < self.len() {
            Ok(v as u32)
        } else {
            Err(Error::Index {
                index: v,
                len: self.len(),
            })
        }
    }

    /// Delaunay neighbours of `v` in ascending index order.
    pub fn neighbors(&self, v: usize) -> Result<&[u32]> {
        let v = self.check_index(v)?;
        Ok(self.adjacent(v))
    }

    #[inline]
    pub(crate) fn adjacent(&self, v: u32) -> &[u32] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.neighbors[lo..hi]
    }

    pub fn are_adjacent(&self, u: u32, v: u32) -> bool {
        (u as usize) < self.len() && self.adjacent(u).binary_search(&v).is_ok()
    }

    /// Counter-clockwise triangles.
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Triangle across the edge opposite corner `k`, if any.
    pub fn triangle_across(&self, t: u32, k: usize) -> Option<u32> {
        let n = self.adjacency[t as usize][k];
        (n != NONE).then_some(n)
    }

    /// Convex hull vertices in counter-clockwise order.
    pub fn hull(&self) -> &[u32] {
        &self.hull
    }

    /// Closed convex hull membership.
    pub fn hull_contains(&self, q: Point2) -> bool {
        let h = &self.hull;
        (0..h.len()).all(|i| orient(self.point(h[i]), self.point(h[(i + 1) % h.len()]), q) >= 0.0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len())
            .map(|v| (self.offsets[v + 1] - self.offsets[v]) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Triangles incident to `v`.
    pub fn star(&self, v: u32) -> Vec<u32> {
        let start = self.vertex_triangle[v as usize];
        if start == NONE {
            return Vec::new();
        }
        let mut out = vec![start];
        let mut i = 0;
        while i < out.len() {
            let t = out[i];
            let tv = self.triangles[t as usize];
            let k = tv.iter().position(|&x| x == v).expect("star triangle holds v");
            for j in [(k + 1) % 3, (k + 2) % 3] {
                let n = self.adjacency[t as usize][j];
                if n != NONE && !out.contains(&n) {
                    out.push(n);
                }
            }
            i += 1;
        }
        out
    }

    /// Visibility walk from a triangle incident to `hint` (or triangle 0).
    pub fn locate(&self, q: Point2, hint: Option<u32>) -> Location {
        if self.triangles.is_empty() {
            return Location::Outside;
        }
        let mut t = hint
            .filter(|&v| (v as usize) < self.len())
            .map(|v| self.vertex_triangle[v as usize])
            .filter(|&t| t != NONE)
            .unwrap_or(0);
        let mut guard = 0usize;
        'walk: loop {
            guard += 1;
            if guard > 4 * self.triangles.len() + 16 {
                return self.locate_brute(q);
            }
            let v = self.triangles[t as usize];
            for k in 0..3 {
                if orient(self.point(v[(k + 1) % 3]), self.point(v[(k + 2) % 3]), q) < 0.0 {
                    let n = self.adjacency[t as usize][k];
                    if n == NONE {
                        return Location::Outside;
                    }
                    t = n;
                    continue 'walk;
                }
            }
            if let Some(&s) = v.iter().find(|&&s| self.point(s) == q) {
                return Location::Vertex(s);
            }
            return Location::Triangle(t);
        }
    }

    fn locate_brute(&self, q: Point2) -> Location {
        for (t, v) in self.triangles.iter().enumerate() {
            if (0..3).all(|k| orient(self.point(v[(k + 1) % 3]), self.point(v[(k + 2) % 3]), q) >= 0.0) {
                if let Some(&s) = v.iter().find(|&&s| self.point(s) == q) {
                    return Location::Vertex(s);
                }
                return Location::Triangle(t as u32);
            }
        }
        Location::Outside
    }

    /// Delaunay neighbours of `q` in `DT(X + {q})`, found by simulating the
    /// insertion of `q`. A `q` equal to a site yields that site alone.
    pub fn neighbors_of_query(&self, q: Point2) -> Result<Vec<u32>> {
        self.neighbors_of_query_from(q, None)
    }

    /// As [`neighbors_of_query`](Self::neighbors_of_query), starting the
    /// point location near `hint`.
    pub fn neighbors_of_query_from(&self, q: Point2, hint: Option<u32>) -> Result<Vec<u32>> {
        if !q.is_finite() {
            return Err(Error::Domain(format!("non-finite query {q}")));
        }
        let start = match self.locate(q, hint) {
            Location::Vertex(s) => return Ok(vec![s]),
            Location::Outside => return Err(Error::OutsideHull { x: q.x, y: q.y }),
            Location::Triangle(t) => t,
        };
        let mut conflict = vec![start];
        let mut i = 0;
        while i < conflict.len() {
            let t = conflict[i];
            for &n in &self.adjacency[t as usize] {
                if n != NONE && !conflict.contains(&n) && self.in_circumcircle(n, q) {
                    conflict.push(n);
                }
            }
            i += 1;
        }
        let mut out: Vec<u32> = conflict
            .iter()
            .flat_map(|&t| self.triangles[t as usize])
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn in_circumcircle(&self, t: u32, q: Point2) -> bool {
        let [a, b, c] = self.triangles[t as usize];
        incircle(self.point(a), self.point(b), self.point(c), q) > 0.0
    }

    /// Brute-force empty-circumcircle check over every triangle and site.
    pub fn validate(&self) -> bool {
        for &[a, b, c] in &self.triangles {
            let (pa, pb, pc) = (self.point(a), self.point(b), self.point(c));
            if orient(pa, pb, pc) <= 0.0 {
                return false;
            }
            for (s, &p) in self.points().iter().enumerate() {
                let s = s as u32;
                if s != a && s != b && s != c && incircle(pa, pb, pc, p) > 0.0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Counter-clockwise hull of a triangle soup from its boundary edges.
fn hull_from_boundary(tris: &[[u32; 3]], adj: &[[u32; 3]]) -> Result<Vec<u32>> {
    let mut next: Vec<(u32, u32)> = Vec::new();
    for (t, v) in tris.iter().enumerate() {
        for k in 0..3 {
            if adj[t][k] == NONE {
                next.push((v[(k + 1) % 3], v[(k + 2) % 3]));
            }
        }
    }
    if next.is_empty() {
        return Err(Error::Degenerate("triangle soup has no boundary".into()));
    }
    next.sort_unstable();
    let first = next[0].0;
    let mut hull = vec![first];
    let mut cur = first;
    for _ in 0..next.len() {
        let j = next
            .binary_search_by(|e| e.0.cmp(&cur))
            .map_err(|_| Error::Degenerate("open boundary".into()))?;
        cur = next[j].1;
        if cur == first {
            return Ok(hull);
        }
        hull.push(cur);
    }
    Err(Error::Degenerate("boundary is not a single cycle".into()))
}
