use std::f64::consts::FRAC_PI_8;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::delaunay::SiteSet;

fn random_triangulation(n: usize, seed: u64) -> Triangulation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| Point2::new(rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0))
        .collect();
    Triangulation::build(SiteSet::from_points(pts).unwrap()).unwrap()
}

/// A point strictly inside the hull: a convex combination of three sites of
/// one triangle.
fn interior_point(t: &Triangulation, rng: &mut ChaCha8Rng) -> Point2 {
    let tri = t.triangles()[rng.random_range(0..t.triangles().len())];
    let (mut a, mut b): (f64, f64) = (rng.random(), rng.random());
    if a + b > 1.0 {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    let [p, q, r] = tri.map(|v| t.point(v));
    p + (q - p) * a + (r - p) * b
}

fn assert_matches_oracle<G: SiteGraph>(g: &G, trace: &WalkTrace) {
    let oracle = oracle_walk(g, trace.start, trace.aim).unwrap();
    assert_eq!(oracle.len(), trace.kappa + 1);
    for (s, o) in trace.steps.iter().zip(&oracle) {
        match o {
            OracleStep::Stopper {
                stopper,
                radius,
                intermediates,
            } => {
                assert_eq!(s.stopper, *stopper);
                assert_eq!(s.radius, *radius);
                assert_eq!(&s.intermediates, intermediates);
            }
            OracleStep::Terminal { .. } => panic!("oracle stopped early at step {}", s.index),
        }
    }
    match oracle.last().unwrap() {
        OracleStep::Terminal { intermediates } => {
            assert_eq!(&trace.final_substeps[1..], &intermediates[..]);
        }
        other => panic!("oracle did not terminate: {other:?}"),
    }
}

#[test]
fn two_site_example() {
    let g = NeighborGraph::from_edges(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], &[(0, 1)])
        .unwrap();
    let q = Point2::new(3.0, 0.0);
    let t = walk_graph(&g, 0, q).unwrap();
    assert_eq!(t.kappa, 1);
    assert_eq!(t.steps[0].stopper, 1);
    assert_eq!(t.steps[0].radius, 0.5);
    assert_eq!(t.steps[0].angle, 0.0);
    assert!(t.steps[0].intermediates.is_empty());
    assert_eq!(t.terminal, 1);
    assert_eq!(t.visited_count, 2);
    assert_eq!(t.stoppers(), vec![0, 1]);

    match step_oracle(&g, 0, q).unwrap() {
        OracleStep::Stopper {
            stopper,
            radius,
            intermediates,
        } => {
            assert_eq!((stopper, radius), (1, 0.5));
            assert!(intermediates.is_empty());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn sites_behind_start_give_no_steps() {
    let pts = vec![
        Point2::new(0.0, 0.0),
        Point2::new(-1.0, 0.5),
        Point2::new(-1.0, -0.5),
        Point2::new(-2.0, 0.0),
    ];
    let g = NeighborGraph::from_edges(pts, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
    let t = walk_graph(&g, 0, Point2::new(1.0, 0.0)).unwrap();
    assert_eq!(t.kappa, 0);
    assert_eq!(t.terminal, 0);
    assert_eq!(t.final_substeps, vec![0]);
    assert_eq!(t.visited_count, 1);
    // both neighbours were inserted even though neither is reachable
    assert_eq!(t.accessed_total, 2);
}

#[test]
fn near_aim_is_terminal_for_oracle() {
    let g = NeighborGraph::from_edges(vec![Point2::new(0.0, 0.0), Point2::new(5.0, 0.0)], &[(0, 1)])
        .unwrap();
    assert_eq!(
        step_oracle(&g, 0, Point2::new(1.0, 0.0)).unwrap(),
        OracleStep::Terminal {
            intermediates: vec![]
        }
    );
}

#[test]
fn twelve_sites_left_to_right() {
    let t = random_triangulation(12, 12);
    let pts = t.points();
    let z = (0..12).min_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x)).unwrap();
    let right = (0..12).max_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x)).unwrap();
    let centroid = pts.iter().fold(Point2::default(), |s, &p| s + p * (1.0 / 12.0));
    let q = pts[right] * 0.9 + centroid * 0.1;
    let trace = cone_walk(&t, z, q).unwrap();
    assert!(trace.kappa >= 1);
    assert_matches_oracle(&t, &trace);
}

#[test]
fn first_step_matches_step_oracle() {
    let t = random_triangulation(20, 20);
    let q = t.point(19) * 0.5 + t.point(3) * 0.5;
    let trace = cone_walk(&t, 0, q).unwrap();
    let first = step_oracle(&t, 0, q).unwrap();
    match (trace.steps.first(), first) {
        (
            Some(s),
            OracleStep::Stopper {
                stopper,
                radius,
                intermediates,
            },
        ) => {
            assert_eq!(s.stopper, stopper);
            assert_eq!(s.radius, radius);
            assert_eq!(s.intermediates, intermediates);
        }
        (None, OracleStep::Terminal { .. }) => {}
        (s, o) => panic!("engine {s:?} vs oracle {o:?}"),
    }
}

#[test]
fn oracle_equivalence_on_seeded_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..60 {
        let n = rng.random_range(10..=200);
        let t = random_triangulation(n, 1000 + k);
        let z = rng.random_range(0..n);
        let q = interior_point(&t, &mut rng);
        let trace = cone_walk(&t, z, q).unwrap();
        assert_matches_oracle(&t, &trace);
    }
}

#[test]
fn aim_on_a_site_short_circuits() {
    let t = random_triangulation(50, 3);
    let trace = cone_walk(&t, 0, t.point(17)).unwrap();
    assert_eq!(trace.kappa, 0);
    assert_eq!(trace.terminal, 17);
    let trace = cone_walk(&t, 17, t.point(17)).unwrap();
    assert_eq!((trace.kappa, trace.terminal), (0, 17));
}

#[test]
fn rejects_bad_inputs() {
    let t = random_triangulation(30, 4);
    assert!(matches!(
        cone_walk(&t, 30, Point2::new(5.0, 5.0)),
        Err(Error::Index { index: 30, len: 30 })
    ));
    assert!(matches!(
        cone_walk(&t, 0, Point2::new(-50.0, 5.0)),
        Err(Error::OutsideHull { .. })
    ));
    assert!(cone_walk(&t, 0, Point2::new(f64::NAN, 5.0)).is_err());
}

#[test]
fn lemmata_hold_on_a_thousand_sites() {
    let t = random_triangulation(1000, 99);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let z = rng.random_range(0..1000);
        let q = interior_point(&t, &mut rng);
        let trace = cone_walk(&t, z, q).unwrap();
        let v = check_step_lemmata(&t, &trace, 1000);
        assert!(v.is_empty(), "{v:?}");
    }
}

#[test]
fn text_round_trip() {
    let t = random_triangulation(200, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trace = cone_walk(&t, 0, interior_point(&t, &mut rng)).unwrap();
    let doc = TraceDocument::from(&trace);
    let text = doc.to_string();
    let back: TraceDocument = text.parse().unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.to_string(), text);
    assert!(text.starts_with(&format!("z 0\nq {} {}\n", trace.aim.x, trace.aim.y)));
    let truncated: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
    if trace.kappa > 0 {
        assert!(truncated.parse::<TraceDocument>().is_err());
    }
}

/// Checks every per-trace invariant against brute-force scans.
fn check_invariants(t: &Triangulation, trace: &WalkTrace) {
    let q = trace.aim;
    assert_eq!(trace.kappa, trace.steps.len());
    let inter: usize = trace.steps.iter().map(|s| s.intermediates.len()).sum();
    assert_eq!(trace.visited_count, trace.kappa + 1 + inter);
    assert!(!trace.terminal_fallback);
    let nbrs = t.neighbors_of_query(q).unwrap();
    assert!(nbrs.contains(&trace.terminal));

    let mut last_l = f64::INFINITY;
    for s in &trace.steps {
        let za = t.point(s.from);
        let frame = ConeFrame::new(za, q).unwrap();
        // stopper sits on the boundary of the cone of radius R_i
        let r = frame.min_disc_radius(t.point(s.stopper)).value().unwrap();
        assert!((r - s.radius).abs() <= 1e-9 * s.radius);
        assert!(s.angle.abs() <= FRAC_PI_8 + 1e-12);
        assert!(s.distance_to_aim < last_l);
        last_l = s.distance_to_aim;
        // emptiness
        for v in 0..t.len() as u32 {
            if v == s.from || v == s.stopper {
                continue;
            }
            let p = t.point(v);
            if let Some(rv) = frame.min_disc_radius(p).value() {
                if rv < s.radius {
                    assert!(!frame.in_cone(p).unwrap(), "site {v} inside step {} cone", s.index);
                    assert!(s.intermediates.contains(&v));
                }
            }
        }
        // locality: each visited site touches the anchor or an earlier one
        let mut seen = vec![s.from];
        for &v in s.intermediates.iter().chain(std::iter::once(&s.stopper)) {
            assert!(seen.iter().any(|&u| t.are_adjacent(u, v)));
            let rv = frame.min_disc_radius(t.point(v)).value().unwrap();
            assert!(rv <= s.radius);
            seen.push(v);
        }
    }
    let lk = t.point(trace.last_stopper()).dist(q);
    assert!(lk < last_l && lk >= 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walk_invariants(seed in any::<u64>(), n in 10usize..300) {
        let t = random_triangulation(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let z = rng.random_range(0..n);
        let q = interior_point(&t, &mut rng);
        let trace = cone_walk(&t, z, q).unwrap();
        check_invariants(&t, &trace);
        let v = check_step_lemmata(&t, &trace, 0);
        prop_assert!(v.is_empty(), "{:?}", v);
    }
}
