//! Adaptive exact orientation and incircle tests for the triangulation code.

use robust::Coord;

use crate::geom::Point2;

#[inline]
fn c(p: Point2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Positive when `c` lies left of the directed line `a -> b`.
#[inline]
pub(crate) fn orient(a: Point2, b: Point2, p: Point2) -> f64 {
    robust::orient2d(c(a), c(b), c(p))
}

/// Positive when `d` lies strictly inside the circle through the
/// counter-clockwise triangle `a, b, c`.
#[inline]
pub(crate) fn incircle(a: Point2, b: Point2, cc: Point2, d: Point2) -> f64 {
    robust::incircle(c(a), c(b), c(cc), c(d))
}

/// For collinear `a, b, p`: whether `p` lies strictly between `a` and `b`.
#[inline]
pub(crate) fn strictly_between(a: Point2, b: Point2, p: Point2) -> bool {
    let d = b - a;
    let t = (p - a).dot(d);
    t > 0.0 && t < d.norm2()
}
