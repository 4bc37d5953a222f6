//! Geometric checks on a finished trace.
//!
//! * Cones: when `L_i > (2 + sqrt 2) R_i`, `Disc(Z_i, q, R_i)` only touches
//!   `Cone(Z_{i+1}, q, inf)` at its apex.
//! * Discs: when `q` is outside `Disc(Z_{i+1}, q, R_{i+1})`, that disc misses
//!   `Disc(Z_i, q, R_i) \ Cone(Z_i, q, R_i)`.
//! * Progress: `L_i - R_i (1 + cos 2a_i) <= L_{i+1} <= L_i - R_i (1 + cos 2a_i) + 2 R_i^2 / L_i`.
//!
//! The first two are checked analytically and, when `boundary_samples > 0`,
//! also by sampling points on the disc boundaries.

use std::f64::consts::{SQRT_2, TAU};
use std::fmt;

use crate::geom::{ConeFrame, Point2, COS2_HALF_ANGLE, HALF_ANGLE};

use super::{SiteGraph, WalkTrace};

const REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaKind {
    IndependentCones,
    IndependentDiscs,
    ProgressSandwich,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaViolation {
    pub step: usize,
    pub kind: LemmaKind,
    pub detail: String,
}

impl fmt::Display for LemmaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {:?}: {}", self.step, self.kind, self.detail)
    }
}

#[derive(Clone, Copy)]
struct Disc {
    center: Point2,
    radius: f64,
}

pub fn check_step_lemmata<G: SiteGraph + ?Sized>(
    g: &G,
    trace: &WalkTrace,
    boundary_samples: usize,
) -> Vec<LemmaViolation> {
    let q = trace.aim;
    let mut out = Vec::new();
    let disc_of = |i: usize| -> Option<(ConeFrame, Disc)> {
        let s = &trace.steps[i];
        let f = ConeFrame::new(g.site(s.from), q).ok()?;
        Some((
            f,
            Disc {
                center: f.disc_center(s.radius),
                radius: s.radius,
            },
        ))
    };

    for (i, s) in trace.steps.iter().enumerate() {
        let li = s.distance_to_aim;
        let ri = s.radius;
        let next = g.site(s.stopper);
        let Some((frame_i, disc_i)) = disc_of(i) else {
            continue;
        };

        // progress sandwich
        let gain = ri * (1.0 + (2.0 * s.angle).cos());
        let lo = li - gain;
        let hi = lo + 2.0 * ri * ri / li;
        let l_next = next.dist(q);
        let tol = REL_TOL * li;
        if l_next < lo - tol || l_next > hi + tol {
            out.push(LemmaViolation {
                step: i,
                kind: LemmaKind::ProgressSandwich,
                detail: format!("L_i+1 = {l_next} outside [{lo}, {hi}]"),
            });
        }

        // cones
        if li > (2.0 + SQRT_2) * ri && next != q {
            let cone = ConeFrame::new(next, q).expect("next != q");
            let d = distance_to_cone(&cone, disc_i.center);
            if d < disc_i.radius * (1.0 - REL_TOL) {
                out.push(LemmaViolation {
                    step: i,
                    kind: LemmaKind::IndependentCones,
                    detail: format!("disc centre {} from next cone, radius {}", d, disc_i.radius),
                });
            } else if let Some(p) = sample_circle(disc_i, boundary_samples)
                .find(|&p| strictly_in_cone(&cone, p, disc_i.radius))
            {
                out.push(LemmaViolation {
                    step: i,
                    kind: LemmaKind::IndependentCones,
                    detail: format!("boundary sample {p} inside next cone"),
                });
            }
        }

        // discs
        if i + 1 < trace.steps.len() {
            let Some((_, disc_j)) = disc_of(i + 1) else {
                continue;
            };
            if disc_j.center.dist(q) <= disc_j.radius {
                continue;
            }
            let scale = disc_i.radius + disc_j.radius;
            let apex = frame_i.apex();
            let mut bad = None;
            for n in outward_normals(&frame_i) {
                if let Some(m) = lens_max(disc_i, disc_j, n, apex) {
                    if m > REL_TOL * scale {
                        bad = Some(format!("lens reaches {m} beyond cone side"));
                    }
                }
            }
            if bad.is_none() && boundary_samples > 0 {
                let outside_cone_inside_disc_i = |p: Point2| {
                    disc_i.center.dist(p) < disc_i.radius * (1.0 - REL_TOL)
                        && !in_cone_with_margin(&frame_i, p, scale)
                };
                let hit = sample_circle(disc_j, boundary_samples)
                    .find(|&p| outside_cone_inside_disc_i(p))
                    .or_else(|| {
                        sample_circle(disc_i, boundary_samples).find(|&p| {
                            disc_j.center.dist(p) < disc_j.radius * (1.0 - REL_TOL)
                                && !in_cone_with_margin(&frame_i, p, scale)
                        })
                    });
                if let Some(p) = hit {
                    bad = Some(format!("boundary sample {p} in both discs outside cone"));
                }
            }
            if let Some(detail) = bad {
                out.push(LemmaViolation {
                    step: i,
                    kind: LemmaKind::IndependentDiscs,
                    detail,
                });
            }
        }
    }
    out
}

fn rotate(v: Point2, angle: f64) -> Point2 {
    let (s, c) = angle.sin_cos();
    Point2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Euclidean distance from `p` to the closed infinite cone of `frame`.
fn distance_to_cone(frame: &ConeFrame, p: Point2) -> f64 {
    let d = p - frame.apex();
    let n2 = d.norm2();
    if n2 == 0.0 {
        return 0.0;
    }
    let proj = d.dot(frame.axis());
    if proj > 0.0 && proj * proj >= COS2_HALF_ANGLE * n2 {
        return 0.0;
    }
    [HALF_ANGLE, -HALF_ANGLE]
        .into_iter()
        .map(|a| {
            let u = rotate(frame.axis(), a);
            let t = d.dot(u);
            if t > 0.0 {
                (d - u * t).norm()
            } else {
                d.norm()
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn strictly_in_cone(frame: &ConeFrame, p: Point2, scale: f64) -> bool {
    let d = p - frame.apex();
    let n2 = d.norm2();
    if n2.sqrt() <= REL_TOL * scale {
        return false;
    }
    let proj = d.dot(frame.axis());
    // the cone side at distance |d| is |d| sin(pi/8) away from the axis
    proj > 0.0 && proj * proj > COS2_HALF_ANGLE * n2 + REL_TOL * scale * n2.sqrt()
}

fn in_cone_with_margin(frame: &ConeFrame, p: Point2, scale: f64) -> bool {
    let d = p - frame.apex();
    let n2 = d.norm2();
    if n2.sqrt() <= REL_TOL * scale {
        return true;
    }
    let proj = d.dot(frame.axis());
    proj > -REL_TOL * scale && proj * proj >= COS2_HALF_ANGLE * n2 - REL_TOL * scale * n2.sqrt()
}

/// Outward unit normals of the two half-planes whose intersection is the
/// infinite cone of `frame`.
fn outward_normals(frame: &ConeFrame) -> [Point2; 2] {
    let up = rotate(frame.axis(), HALF_ANGLE);
    let down = rotate(frame.axis(), -HALF_ANGLE);
    // left normal of `up` points away from the axis, right normal of `down`
    [Point2::new(-up.y, up.x), Point2::new(down.y, -down.x)]
}

/// Maximum of `n . (x - origin)` over the intersection of two discs, or
/// `None` when they do not meet.
fn lens_max(a: Disc, b: Disc, n: Point2, origin: Point2) -> Option<f64> {
    let ca = a.center - origin;
    let cb = b.center - origin;
    let d = ca.dist(cb);
    if d > a.radius + b.radius {
        return None;
    }
    let slack = 1e-12 * (a.radius + b.radius);
    let in_a = |p: Point2| p.dist(ca) <= a.radius + slack;
    let in_b = |p: Point2| p.dist(cb) <= b.radius + slack;
    let mut best = f64::NEG_INFINITY;
    let xa = ca + n * a.radius;
    if in_b(xa) {
        best = best.max(n.dot(xa));
    }
    let xb = cb + n * b.radius;
    if in_a(xb) {
        best = best.max(n.dot(xb));
    }
    if d > 0.0 && d >= (a.radius - b.radius).abs() {
        let t = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
        let h = (a.radius * a.radius - t * t).max(0.0).sqrt();
        let u = (cb - ca) * (1.0 / d);
        let mid = ca + u * t;
        let perp = Point2::new(-u.y, u.x);
        for p in [mid + perp * h, mid - perp * h] {
            best = best.max(n.dot(p));
        }
    }
    best.is_finite().then_some(best)
}

fn sample_circle(d: Disc, m: usize) -> impl Iterator<Item = Point2> {
    (0..m).map(move |k| {
        let a = TAU * k as f64 / m as f64;
        d.center + Point2::new(a.cos(), a.sin()) * d.radius
    })
}
