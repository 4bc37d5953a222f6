//! Planar points, search cones and discs, and the closed-form laws that
//! govern a single cone-walk step on a unit-intensity Poisson process.
//!
//! For an apex `z` and an aim `q`, `Disc(z, q, r)` is the closed disc whose
//! diameter runs from `z` to the point at distance `2r` along the ray `zq`,
//! and `Cone(z, q, r)` is the part of that disc inside the closed cone of
//! apex `z`, axis `zq` and half angle pi/8.
//!
//! The predicates here only use dot products and squared norms.

use std::f64::consts::{FRAC_PI_8, PI, SQRT_2};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Half angle of every search cone.
pub const HALF_ANGLE: f64 = FRAC_PI_8;

/// cos^2(pi/8), written as (2 + sqrt 2) / 4.
pub const COS2_HALF_ANGLE: f64 = (2.0 + SQRT_2) / 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(Error::Domain(format!("non-finite coordinate ({x}, {y})")))
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    #[inline]
    pub fn dist2(self, other: Point2) -> f64 {
        (self - other).norm2()
    }

    #[inline]
    pub fn dist(self, other: Point2) -> f64 {
        self.dist2(other).sqrt()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Radius of the smallest search disc that reaches a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    Finite(f64),
    /// The point is never reached by a disc growing from the apex toward
    /// the aim (it lies in the closed half-plane behind the apex).
    Unreachable,
}

impl Radius {
    pub fn value(self) -> Option<f64> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Unreachable => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Radius::Finite(_))
    }

    /// `+inf` for unreachable points, convenient for ordering.
    pub fn or_infinity(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

/// Apex and aim of a family of search cones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeFrame {
    apex: Point2,
    aim: Point2,
    axis: Point2,
}

impl ConeFrame {
    pub fn new(apex: Point2, aim: Point2) -> Result<Self> {
        if !apex.is_finite() || !aim.is_finite() {
            return Err(Error::Domain("cone frame with non-finite point".into()));
        }
        let d = aim - apex;
        let len = d.norm();
        if len == 0.0 {
            return Err(Error::Domain(format!("cone apex coincides with aim {apex}")));
        }
        Ok(ConeFrame {
            apex,
            aim,
            axis: d * (1.0 / len),
        })
    }

    pub fn apex(&self) -> Point2 {
        self.apex
    }

    pub fn aim(&self) -> Point2 {
        self.aim
    }

    /// Unit vector from apex toward aim.
    pub fn axis(&self) -> Point2 {
        self.axis
    }

    /// Scalar projection of `p - apex` onto the axis.
    #[inline]
    pub fn projection(&self, p: Point2) -> f64 {
        (p - self.apex).dot(self.axis)
    }

    /// Smallest `r >= 0` with `p` in `Disc(apex, aim, r)`.
    ///
    /// This is `|zp|^2 / (2 proj)`; points with `proj <= 0` are never reached.
    /// The apex itself lies on every disc and gets radius zero.
    #[inline]
    pub fn min_disc_radius(&self, p: Point2) -> Radius {
        let d = p - self.apex;
        let n2 = d.norm2();
        if n2 == 0.0 {
            return Radius::Finite(0.0);
        }
        let proj = d.dot(self.axis);
        if proj > 0.0 {
            Radius::Finite(n2 / (2.0 * proj))
        } else {
            Radius::Unreachable
        }
    }

    /// Same as [`min_disc_radius`](Self::min_disc_radius) but with `+inf`
    /// for unreachable points.
    #[inline]
    pub(crate) fn radius_key(&self, p: Point2) -> f64 {
        self.min_disc_radius(p).or_infinity()
    }

    /// Whether `p` lies in the closed infinite cone of half angle pi/8.
    pub fn in_cone(&self, p: Point2) -> Result<bool> {
        let d = p - self.apex;
        let n2 = d.norm2();
        if n2 == 0.0 {
            return Err(Error::Domain(format!("{p} is the cone apex")));
        }
        Ok(self.in_cone_unchecked(d.dot(self.axis), n2))
    }

    #[inline]
    pub(crate) fn in_cone_unchecked(&self, proj: f64, n2: f64) -> bool {
        proj > 0.0 && proj * proj >= COS2_HALF_ANGLE * n2
    }

    /// Centre of `Disc(apex, aim, r)`.
    pub fn disc_center(&self, r: f64) -> Point2 {
        self.apex + self.axis * r
    }

    /// Signed angle from the axis to `p - apex`, positive counter-clockwise.
    pub fn signed_angle(&self, p: Point2) -> f64 {
        let d = p - self.apex;
        self.axis.cross(d).atan2(self.axis.dot(d))
    }
}

/// `P(|alpha| < x)` for the stopper angle, `x` in `[0, pi/8]`.
pub fn angle_cdf(x: f64) -> Result<f64> {
    if !(0.0..=HALF_ANGLE).contains(&x) {
        return Err(Error::Domain(format!("angle {x} outside [0, pi/8]")));
    }
    if x == HALF_ANGLE {
        return Ok(1.0);
    }
    Ok(angle_normaliser() * (x + (2.0 * x).sin() / 2.0))
}

/// Density of the signed stopper angle on `[-pi/8, pi/8]`; zero outside.
pub fn angle_density(x: f64) -> f64 {
    if x.abs() > HALF_ANGLE {
        0.0
    } else {
        angle_normaliser() * (1.0 + (2.0 * x).cos()) / 2.0
    }
}

fn angle_normaliser() -> f64 {
    8.0 / (PI + 2.0 * SQRT_2)
}

/// Area of `Cone(z, q, 1)`.
pub fn cone_area() -> f64 {
    SQRT_2 / 2.0 + PI / 4.0
}

/// Survival function `P(R >= x) = exp(-A x^2)` of the ideal step radius.
pub fn radius_survival(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("radius {x} is negative")));
    }
    Ok((-cone_area() * x * x).exp())
}

/// Closed-form and quadrature constants of the step laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryConstants {
    /// Area of `Cone(z, q, 1)`.
    pub cone_area_a: f64,
    /// Mean step radius, `sqrt(pi / (2 sqrt 2 + pi))`.
    pub expected_radius: f64,
    /// Upper bound on the mean number of intermediate sites per disc,
    /// `(pi - A) / A`.
    pub expected_intermediates: f64,
    /// Upper bound on the ratio of Simple-Path length to initial distance.
    pub path_length_const: f64,
    /// `4 cos(pi/8)`, the Competitive-Path guarantee with stretch factor 2.
    pub competitiveness_bound: f64,
    /// `E[R (1 + cos 2 alpha)]`, the mean progress per step.
    pub mean_progress: f64,
}

pub fn theory_constants() -> TheoryConstants {
    let a = cone_area();
    let expected_radius = (PI / (2.0 * SQRT_2 + PI)).sqrt();
    TheoryConstants {
        cone_area_a: a,
        expected_radius,
        expected_intermediates: (PI - a) / a,
        path_length_const: (22.0 * PI - 4.0 * SQRT_2) / (2.0 + 3.0 * PI + 8.0 * SQRT_2),
        competitiveness_bound: 4.0 * HALF_ANGLE.cos(),
        mean_progress: mean_progress_quadrature(),
    }
}

/// `E[R (1 + cos 2 alpha)]` with independent `R` and `alpha`, by quadrature
/// of `E[R] = int_0^inf P(R >= x) dx` and `E[1 + cos 2 alpha]` against the
/// angle density.
fn mean_progress_quadrature() -> f64 {
    // exp(-A * 9^2) is far below f64 resolution relative to E[R].
    let mean_r = simpson(|x| (-cone_area() * x * x).exp(), 0.0, 9.0, 4096);
    let mean_gain = simpson(
        |x| angle_density(x) * (1.0 + (2.0 * x).cos()),
        -HALF_ANGLE,
        HALF_ANGLE,
        1024,
    );
    mean_r * mean_gain
}

/// Composite Simpson rule over `intervals` (rounded up to even) panels.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(z: (f64, f64), q: (f64, f64)) -> ConeFrame {
        ConeFrame::new(Point2::new(z.0, z.1), Point2::new(q.0, q.1)).unwrap()
    }

    /// Grow r in small increments until p enters the disc.
    fn brute_force_radius(f: &ConeFrame, p: Point2, step: f64, max: f64) -> Option<f64> {
        let mut r = 0.0;
        while r <= max {
            if f.disc_center(r).dist(p) <= r {
                return Some(r);
            }
            r += step;
        }
        None
    }

    #[test]
    fn collinear_point_radius_is_half_distance() {
        let f = frame((0.0, 0.0), (1.0, 0.0));
        assert_eq!(f.min_disc_radius(Point2::new(2.0, 0.0)), Radius::Finite(1.0));
    }

    #[test]
    fn off_axis_radius_matches_growth_oracle() {
        let f = frame((0.0, 0.0), (1.0, 0.0));
        let p = Point2::new(1.0, 1.0);
        let oracle = brute_force_radius(&f, p, 1e-6, 10.0).unwrap();
        assert!((oracle - 1.0).abs() < 2e-6);
        let r = f.min_disc_radius(p).value().unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perpendicular_point_is_unreachable() {
        let f = frame((0.0, 0.0), (1.0, 0.0));
        assert_eq!(f.min_disc_radius(Point2::new(0.0, 1.0)), Radius::Unreachable);
        assert_eq!(f.min_disc_radius(Point2::new(-3.0, 0.5)), Radius::Unreachable);
    }

    #[test]
    fn apex_equal_to_aim_is_rejected() {
        let p = Point2::new(1.0, 2.0);
        assert!(matches!(ConeFrame::new(p, p), Err(Error::Domain(_))));
    }

    #[test]
    fn in_cone_examples() {
        let f = frame((0.0, 0.0), (1.0, 0.0));
        assert!(f.in_cone(Point2::new(5.0, 0.0)).unwrap());
        assert!(!f.in_cone(Point2::new(1.0, 1.0)).unwrap());
        let edge = Point2::new(HALF_ANGLE.cos(), HALF_ANGLE.sin());
        assert!(f.in_cone(edge).unwrap(), "closed cone includes its boundary");
        assert!(f.in_cone(Point2::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn cos2_constant_is_exact() {
        assert!((COS2_HALF_ANGLE - HALF_ANGLE.cos().powi(2)).abs() < 1e-16);
    }

    #[test]
    fn angle_cdf_examples() {
        assert_eq!(angle_cdf(0.0).unwrap(), 0.0);
        assert_eq!(angle_cdf(HALF_ANGLE).unwrap(), 1.0);
        // Oracle: integrate the signed density over [-x, x].
        let x = PI / 16.0;
        let quad = simpson(angle_density, -x, x, 2000);
        let v = angle_cdf(x).unwrap();
        assert!((v - quad).abs() < 1e-12);
        assert!((v - 0.519_517_551_266_763).abs() < 1e-12);
        assert!(angle_cdf(-0.1).is_err());
        assert!(angle_cdf(0.5).is_err());
    }

    #[test]
    fn angle_density_integrates_to_one() {
        let total = simpson(angle_density, -HALF_ANGLE, HALF_ANGLE, 1000);
        assert!((total - 1.0).abs() < 1e-6);
        // numeric derivative of the cdf integrates back to one as well
        let h = 1e-6;
        let deriv = |x: f64| {
            let lo = (x - h).max(0.0);
            let hi = (x + h).min(HALF_ANGLE);
            (angle_cdf(hi).unwrap() - angle_cdf(lo).unwrap()) / (hi - lo)
        };
        let total = simpson(deriv, 0.0, HALF_ANGLE, 1000);
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn radius_survival_examples() {
        assert_eq!(radius_survival(0.0).unwrap(), 1.0);
        let a = 2.0 * (HALF_ANGLE.cos() * HALF_ANGLE.sin() + HALF_ANGLE);
        assert!((radius_survival(1.0).unwrap() - (-a).exp()).abs() < 1e-15);
        assert!((radius_survival(1.0).unwrap() - 0.224_808_816).abs() < 1e-9);
        let median = (std::f64::consts::LN_2 / a).sqrt();
        assert!((radius_survival(median).unwrap() - 0.5).abs() < 1e-15);
        assert!((median - 0.681_482_709).abs() < 1e-9);
        assert!(radius_survival(-1e-3).is_err());
    }

    #[test]
    fn theory_constants_values() {
        let c = theory_constants();
        let a = 2.0 * (HALF_ANGLE.cos() * HALF_ANGLE.sin() + HALF_ANGLE);
        assert!((c.cone_area_a - a).abs() < 1e-15);
        assert!((c.expected_radius - 0.72542).abs() < 5e-6);
        assert!((c.expected_intermediates - 1.1049).abs() < 5e-5);
        assert!((c.path_length_const - 2.7907).abs() < 1e-4);
        assert!((c.competitiveness_bound - 3.69552).abs() < 5e-6);
        assert!(c.competitiveness_bound <= 3.7);
        // E[R] by quadrature matches its closed form
        let er = simpson(|x| radius_survival(x).unwrap(), 0.0, 9.0, 4096);
        assert!((er - c.expected_radius).abs() < 1e-12);
        // closed form of E[1 + cos 2 alpha]
        let gain = 1.0 + angle_normaliser() * (SQRT_2 / 4.0 + PI / 16.0 + 0.125);
        assert!((c.mean_progress - c.expected_radius * gain).abs() < 1e-10);
        // Simple-Path constant from its moment expression
        let er3 = simpson(|x| 3.0 * x * x * radius_survival(x).unwrap(), 0.0, 9.0, 4096);
        let via_moments = (2.0 * c.expected_radius + 2.0 * (PI - a) * er3) / c.mean_progress;
        assert!((via_moments - c.path_length_const).abs() < 1e-9);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -100.0..100.0f64
    }

    fn rotate(p: Point2, c: f64, s: f64, t: Point2) -> Point2 {
        Point2::new(c * p.x - s * p.y, s * p.x + c * p.y) + t
    }

    proptest! {
        #[test]
        fn finite_radius_puts_point_on_boundary(
            zx in coord(), zy in coord(), qx in coord(), qy in coord(),
            px in coord(), py in coord(),
        ) {
            let z = Point2::new(zx, zy);
            let q = Point2::new(qx, qy);
            let p = Point2::new(px, py);
            prop_assume!(z.dist(q) > 1e-6 && z.dist(p) > 1e-6);
            let f = ConeFrame::new(z, q).unwrap();
            if let Radius::Finite(r) = f.min_disc_radius(p) {
                let c = f.disc_center(r);
                prop_assert!((c.dist(p) - r).abs() <= 1e-9 * r.max(z.dist(p)));
                let shrunk = r * (1.0 - 1e-6);
                prop_assert!(f.disc_center(shrunk).dist(p) > shrunk);
            }
        }

        #[test]
        fn predicates_invariant_under_rigid_motion(
            zx in coord(), zy in coord(), qx in coord(), qy in coord(),
            px in coord(), py in coord(), theta in 0.0..std::f64::consts::TAU,
            tx in coord(), ty in coord(),
        ) {
            let z = Point2::new(zx, zy);
            let q = Point2::new(qx, qy);
            let p = Point2::new(px, py);
            prop_assume!(z.dist(q) > 1e-3 && z.dist(p) > 1e-3);
            let f = ConeFrame::new(z, q).unwrap();
            // stay away from the cone boundary and the reachability line
            let ang = f.signed_angle(p).abs();
            prop_assume!((ang - HALF_ANGLE).abs() > 1e-6 && (ang - PI / 2.0).abs() > 1e-6);
            let (c, s) = (theta.cos(), theta.sin());
            let t = Point2::new(tx, ty);
            let g = ConeFrame::new(rotate(z, c, s, t), rotate(q, c, s, t)).unwrap();
            let pm = rotate(p, c, s, t);
            prop_assert_eq!(f.in_cone(p).unwrap(), g.in_cone(pm).unwrap());
            match (f.min_disc_radius(p), g.min_disc_radius(pm)) {
                (Radius::Finite(a), Radius::Finite(b)) => {
                    // rotation rounding is amplified by 1/proj near the reachability line
                    let tol = 1e-9 * a.max(1.0) / (PI / 2.0 - ang).cos().max(1e-3);
                    prop_assert!((a - b).abs() <= tol, "{} vs {}", a, b);
                }
                (Radius::Unreachable, Radius::Unreachable) => {}
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }

    #[test]
    fn membership_matches_sampling_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..10_000 {
            let z = Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let q = Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let p = Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let Ok(f) = ConeFrame::new(z, q) else { continue };
            // independent route: angles via atan2 and explicit disc distance
            let u = q - z;
            let v = p - z;
            let angle = u.cross(v).atan2(u.dot(v)).abs();
            if (angle - HALF_ANGLE).abs() < 1e-9 {
                continue;
            }
            let in_sector = angle <= HALF_ANGLE;
            let r_probe: f64 = rng.random_range(0.0..10.0);
            let center = z + u * (r_probe / u.norm());
            let in_disc = center.dist(p) <= r_probe;
            let predicted = match f.min_disc_radius(p) {
                Radius::Finite(r) => {
                    if (r - r_probe).abs() < 1e-9 * r.max(1.0) {
                        continue;
                    }
                    r <= r_probe
                }
                Radius::Unreachable => false,
            };
            assert_eq!(predicted, in_disc);
            assert_eq!(predicted && f.in_cone(p).unwrap(), in_disc && in_sector);
            checked += 1;
        }
        assert!(checked > 9_000);
    }
}
