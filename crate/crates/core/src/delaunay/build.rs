//! Incremental Bowyer-Watson construction over a triangle soup with ghost
//! triangles standing in for the unbounded face.
//!
//! Every hull edge `u -> w` (exterior on the left) carries a ghost triangle
//! `[u, w, GHOST]`. A ghost triangle conflicts with `p` when `p` lies strictly
//! outside its hull edge, or on the open edge itself.

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::predicates::{incircle, orient, strictly_between};

pub(crate) const GHOST: u32 = u32::MAX;
pub(crate) const NONE: u32 = u32::MAX;

/// Finite triangles (counter-clockwise) with adjacency, ghosts removed.
pub(crate) struct Mesh {
    pub triangles: Vec<[u32; 3]>,
    pub adjacency: Vec<[u32; 3]>,
    /// Hull vertices in counter-clockwise order.
    pub hull: Vec<u32>,
}

struct Builder<'a> {
    pts: &'a [Point2],
    verts: Vec<[u32; 3]>,
    adj: Vec<[u32; 3]>,
    alive: Vec<bool>,
    mark: Vec<u32>,
    free: Vec<u32>,
    epoch: u32,
    last: u32,
    stack: Vec<u32>,
    cavity: Vec<u32>,
    boundary: Vec<(u32, u32, u32, usize)>,
    starts: Vec<(u32, u32)>,
}

pub(crate) fn triangulate(pts: &[Point2]) -> Result<Mesh> {
    if pts.len() < 3 {
        return Err(Error::TooFewSites(pts.len()));
    }
    let order = insertion_order(pts);
    let (a, b, c) = initial_triangle(pts, &order)?;

    let mut builder = Builder::new(pts, a, b, c);
    let mut steps_budget = 0usize;
    for &v in &order {
        if v == a || v == b || v == c {
            continue;
        }
        builder.insert(v, &mut steps_budget)?;
    }
    Ok(builder.finish())
}

/// Spatially coherent insertion order: sort along a Hilbert curve, ties
/// broken by input index. Depends only on the input, so construction stays
/// deterministic.
fn insertion_order(pts: &[Point2]) -> Vec<u32> {
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let scale = f64::from((1u32 << 16) - 1) / span;
    let mut keyed: Vec<(u64, u32)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = ((p.x - lo.x) * scale) as u32;
            let y = ((p.y - lo.y) * scale) as u32;
            (hilbert_index(16, x, y), i as u32)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn hilbert_index(order: u32, mut x: u32, mut y: u32) -> u64 {
    let n = 1u32 << order;
    let mut d = 0u64;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

fn initial_triangle(pts: &[Point2], order: &[u32]) -> Result<(u32, u32, u32)> {
    let a = order[0];
    let pa = pts[a as usize];
    let b = order
        .iter()
        .copied()
        .find(|&i| pts[i as usize] != pa)
        .ok_or_else(|| Error::Degenerate("all sites coincide".into()))?;
    let pb = pts[b as usize];
    let c = order
        .iter()
        .copied()
        .find(|&i| orient(pa, pb, pts[i as usize]) != 0.0)
        .ok_or_else(|| Error::Degenerate("all sites are collinear".into()))?;
    if orient(pa, pb, pts[c as usize]) > 0.0 {
        Ok((a, b, c))
    } else {
        Ok((b, a, c))
    }
}

/// Adjacency (`NONE` where no triangle shares the edge) for a triangle soup.
pub(crate) fn adjacency_of(tris: &[[u32; 3]]) -> Result<Vec<[u32; 3]>> {
    let mut edges: Vec<(u32, u32, u32, u8)> = Vec::with_capacity(tris.len() * 3);
    for (t, v) in tris.iter().enumerate() {
        for k in 0..3 {
            edges.push((v[(k + 1) % 3], v[(k + 2) % 3], t as u32, k as u8));
        }
    }
    edges.sort_unstable();
    for w in edges.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
            return Err(Error::Degenerate(format!(
                "directed edge {} -> {} used twice",
                w[0].0, w[0].1
            )));
        }
    }
    let mut adj = vec![[NONE; 3]; tris.len()];
    for &(a, b, t, k) in &edges {
        if let Ok(j) = edges.binary_search_by(|e| (e.0, e.1).cmp(&(b, a))) {
            adj[t as usize][k as usize] = edges[j].2;
        }
    }
    Ok(adj)
}

impl<'a> Builder<'a> {
    fn new(pts: &'a [Point2], a: u32, b: u32, c: u32) -> Self {
        let verts = vec![[a, b, c], [b, a, GHOST], [c, b, GHOST], [a, c, GHOST]];
        let adj = adjacency_of(&verts).expect("initial triangle is a closed surface");
        let cap = pts.len() * 2 + 8;
        let mut builder = Builder {
            pts,
            verts: Vec::with_capacity(cap),
            adj: Vec::with_capacity(cap),
            alive: Vec::with_capacity(cap),
            mark: Vec::with_capacity(cap),
            free: Vec::new(),
            epoch: 0,
            last: 0,
            stack: Vec::new(),
            cavity: Vec::new(),
            boundary: Vec::new(),
            starts: Vec::new(),
        };
        builder.verts.extend(verts);
        builder.adj.extend(adj);
        builder.alive.extend([true; 4]);
        builder.mark.extend([0; 4]);
        builder
    }

    #[inline]
    fn pt(&self, v: u32) -> Point2 {
        self.pts[v as usize]
    }

    #[inline]
    fn ghost_slot(&self, t: u32) -> Option<usize> {
        self.verts[t as usize].iter().position(|&v| v == GHOST)
    }

    fn conflicts(&self, t: u32, p: Point2) -> bool {
        let v = self.verts[t as usize];
        match self.ghost_slot(t) {
            Some(g) => {
                let u = self.pt(v[(g + 1) % 3]);
                let w = self.pt(v[(g + 2) % 3]);
                let o = orient(u, w, p);
                o > 0.0 || (o == 0.0 && strictly_between(u, w, p))
            }
            None => incircle(self.pt(v[0]), self.pt(v[1]), self.pt(v[2]), p) > 0.0,
        }
    }

    /// Visibility walk to a triangle in conflict with `p`.
    fn locate(&self, pi: u32, budget: &mut usize) -> Result<u32> {
        let p = self.pt(pi);
        let mut t = self.last;
        if let Some(g) = self.ghost_slot(t) {
            t = self.adj[t as usize][g];
        }
        'walk: loop {
            *budget += 1;
            if *budget > 64 * self.pts.len() + 1_000_000 {
                return Err(Error::Degenerate("point location did not converge".into()));
            }
            let v = self.verts[t as usize];
            for k in 0..3 {
                let a = self.pt(v[(k + 1) % 3]);
                let b = self.pt(v[(k + 2) % 3]);
                if orient(a, b, p) < 0.0 {
                    let n = self.adj[t as usize][k];
                    if self.ghost_slot(n).is_some() {
                        return Ok(n);
                    }
                    t = n;
                    continue 'walk;
                }
            }
            if let Some(&dup) = v.iter().find(|&&u| self.pt(u) == p) {
                return Err(Error::Degenerate(format!(
                    "duplicate site: {pi} coincides with {dup} at {p}"
                )));
            }
            return Ok(t);
        }
    }

    fn alloc(&mut self, v: [u32; 3]) -> u32 {
        if let Some(t) = self.free.pop() {
            self.verts[t as usize] = v;
            self.adj[t as usize] = [NONE; 3];
            self.alive[t as usize] = true;
            t
        } else {
            self.verts.push(v);
            self.adj.push([NONE; 3]);
            self.alive.push(true);
            self.mark.push(0);
            (self.verts.len() - 1) as u32
        }
    }

    fn insert(&mut self, pi: u32, budget: &mut usize) -> Result<()> {
        let p = self.pt(pi);
        let start = self.locate(pi, budget)?;
        self.epoch = self.epoch.wrapping_add(1);
        let epoch = self.epoch;

        self.cavity.clear();
        self.stack.clear();
        self.stack.push(start);
        self.mark[start as usize] = epoch;
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            for k in 0..3 {
                let n = self.adj[t as usize][k];
                if self.mark[n as usize] != epoch && self.conflicts(n, p) {
                    self.mark[n as usize] = epoch;
                    self.stack.push(n);
                }
            }
        }

        self.boundary.clear();
        for &t in &self.cavity {
            let v = self.verts[t as usize];
            for k in 0..3 {
                let n = self.adj[t as usize][k];
                if self.mark[n as usize] != epoch {
                    let slot = self.adj[n as usize]
                        .iter()
                        .position(|&x| x == t)
                        .expect("adjacency is symmetric");
                    self.boundary.push((v[(k + 1) % 3], v[(k + 2) % 3], n, slot));
                }
            }
        }
        for i in 0..self.cavity.len() {
            let t = self.cavity[i];
            self.alive[t as usize] = false;
            self.free.push(t);
        }

        self.starts.clear();
        let boundary = std::mem::take(&mut self.boundary);
        for &(u, w, outer, slot) in &boundary {
            let t = self.alloc([u, w, pi]);
            self.adj[t as usize][2] = outer;
            self.adj[outer as usize][slot] = t;
            self.starts.push((u, t));
        }
        self.starts.sort_unstable();
        for i in 0..self.starts.len() {
            let t = self.starts[i].1;
            let w = self.verts[t as usize][1];
            let j = self
                .starts
                .binary_search_by(|e| e.0.cmp(&w))
                .map_err(|_| Error::Degenerate("cavity boundary is not a cycle".into()))?;
            let t2 = self.starts[j].1;
            self.adj[t as usize][0] = t2;
            self.adj[t2 as usize][1] = t;
        }
        self.last = self
            .starts
            .iter()
            .map(|e| e.1)
            .find(|&t| self.ghost_slot(t).is_none())
            .unwrap_or(self.starts[0].1);
        self.boundary = boundary;
        Ok(())
    }

    fn finish(self) -> Mesh {
        let mut remap = vec![NONE; self.verts.len()];
        let mut triangles = Vec::new();
        let mut hull_next: Vec<(u32, u32)> = Vec::new();
        for (t, v) in self.verts.iter().enumerate() {
            if !self.alive[t] {
                continue;
            }
            match v.iter().position(|&x| x == GHOST) {
                Some(g) => {
                    // exterior left of u -> w, so w -> u runs counter-clockwise
                    let u = v[(g + 1) % 3];
                    let w = v[(g + 2) % 3];
                    hull_next.push((w, u));
                }
                None => {
                    remap[t] = triangles.len() as u32;
                    triangles.push(*v);
                }
            }
        }
        let mut adjacency = Vec::with_capacity(triangles.len());
        for (t, v) in self.verts.iter().enumerate() {
            if !self.alive[t] || v.contains(&GHOST) {
                continue;
            }
            let a = self.adj[t];
            adjacency.push([remap[a[0] as usize], remap[a[1] as usize], remap[a[2] as usize]]);
        }

        hull_next.sort_unstable();
        let first = hull_next[0].0;
        let mut hull = vec![first];
        let mut cur = first;
        loop {
            let j = hull_next
                .binary_search_by(|e| e.0.cmp(&cur))
                .expect("hull is a closed cycle");
            cur = hull_next[j].1;
            if cur == first {
                break;
            }
            hull.push(cur);
        }
        Mesh {
            triangles,
            adjacency,
            hull,
        }
    }
}
