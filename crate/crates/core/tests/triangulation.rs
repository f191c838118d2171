use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trikit::geometry::{is_simple, orientation, Orientation, Point2, SimplePolygon, Tolerance};
use trikit::shapes::{comb, random_star_polygon, random_star_ring, rectangle, regular_polygon};
use trikit::triangulation::{
    dual_graph, find_ears, is_ear, triangulate, triangulate_earclip, triangulate_monotone, verify_triangulation, Method,
};

// ---- independent oracles (exact-sign arithmetic, no tolerance band) ----

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn closed_segments_meet(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let (d1, d2, d3, d4) = (cross(c, d, a), cross(c, d, b), cross(a, b, c), cross(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let within = |p: Point2, q: Point2, r: Point2| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (d1 == 0.0 && within(c, d, a))
        || (d2 == 0.0 && within(c, d, b))
        || (d3 == 0.0 && within(a, b, c))
        || (d4 == 0.0 && within(a, b, d))
}

fn oracle_is_simple(ring: &[Point2]) -> bool {
    let n = ring.len();
    for i in 0..n {
        for j in i + 1..n {
            if ring[i] == ring[j] {
                return false;
            }
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if !adjacent && closed_segments_meet(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn oracle_inside(p: Point2, ring: &[Point2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Convex turn, no vertex in the closed ear triangle, and the cutting
/// diagonal crosses no non-incident edge with its midpoint inside.
fn oracle_is_ear(ring: &[Point2], i: usize) -> bool {
    let n = ring.len();
    let (p, q) = ((i + n - 1) % n, (i + 1) % n);
    let (a, b, c) = (ring[p], ring[i], ring[q]);
    if cross(a, b, c) <= 0.0 {
        return false;
    }
    for k in (0..n).filter(|&k| k != p && k != i && k != q) {
        let v = ring[k];
        if cross(a, b, v) >= 0.0 && cross(b, c, v) >= 0.0 && cross(c, a, v) >= 0.0 {
            return false;
        }
    }
    for k in 0..n {
        let l = (k + 1) % n;
        if [k, l].iter().any(|x| *x == p || *x == q) {
            continue;
        }
        if closed_segments_meet(a, c, ring[k], ring[l]) {
            return false;
        }
    }
    n == 3 || oracle_inside((a + c) * 0.5, ring)
}

/// O(n³) reference ear clipper: rescans every remaining vertex each step
/// and clips the lowest-index ear.
fn oracle_earclip(ring: &[Point2]) -> Vec<[usize; 3]> {
    let mut alive: Vec<usize> = (0..ring.len()).collect();
    let mut out = Vec::new();
    while alive.len() > 3 {
        let pts: Vec<Point2> = alive.iter().map(|&k| ring[k]).collect();
        let pos =
            (0..alive.len()).filter(|&k| oracle_is_ear(&pts, k)).min_by_key(|&k| alive[k]).expect("two ears exist");
        let m = alive.len();
        out.push([alive[(pos + m - 1) % m], alive[pos], alive[(pos + 1) % m]]);
        alive.remove(pos);
    }
    out.push([alive[0], alive[1], alive[2]]);
    out
}

fn canonical(mut tris: Vec<[usize; 3]>) -> Vec<[usize; 3]> {
    for t in &mut tris {
        let m = (0..3).min_by_key(|&k| t[k]).unwrap();
        t.rotate_left(m);
    }
    tris
}

fn corpus(count: usize, seed: u64) -> Vec<SimplePolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=200);
            random_star_polygon(n, rng.random())
        })
        .collect()
}

// ---- tests ----

#[test]
fn is_simple_matches_oracle_on_star_and_random_rings() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.random_range(3..60);
        let star = random_star_ring(n, rng.random());
        assert!(oracle_is_simple(&star));
        assert!(is_simple(&star, Tolerance::for_points(1e-9, &star).unwrap()).is_ok());
    }
    let mut non_simple = 0;
    for _ in 0..1000 {
        let n = rng.random_range(4..20);
        let ring: Vec<Point2> =
            (0..n).map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let expected = oracle_is_simple(&ring);
        non_simple += usize::from(!expected);
        assert_eq!(is_simple(&ring, tol).is_ok(), expected, "{ring:?}");
    }
    assert!(non_simple > 900, "random rings should mostly self-intersect, got {non_simple}");
}

#[test]
fn is_ear_matches_brute_force_oracle() {
    for poly in corpus(300, 5).into_iter().chain([comb(6), rectangle(2.0, 1.0), regular_polygon(9)]) {
        for i in 0..poly.len() {
            assert_eq!(
                is_ear(&poly, i, poly.tolerance()),
                oracle_is_ear(poly.vertices(), i),
                "vertex {i} of {:?}",
                poly.vertices()
            );
        }
    }
}

#[test]
fn earclip_clips_lowest_index_ear_like_the_reference() {
    for poly in corpus(150, 9).into_iter().chain([comb(5)]) {
        let t = triangulate_earclip(&poly).unwrap();
        assert_eq!(t.triangles(), canonical(oracle_earclip(poly.vertices())).as_slice());
    }
}

#[test]
fn two_ears_and_convex_ears() {
    for poly in corpus(1000, 21) {
        if poly.len() >= 4 {
            assert!(find_ears(&poly).len() >= 2);
        }
    }
    for n in 3..40 {
        let hex = regular_polygon(n);
        assert_eq!(find_ears(&hex).ear_indices, (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn both_algorithms_satisfy_counts_area_and_dual_tree() {
    for poly in corpus(300, 3).into_iter().chain([comb(8), rectangle(3.0, 1.0)]) {
        let n = poly.len();
        for method in [Method::EarClip, Method::Monotone] {
            let t = triangulate(&poly, method).unwrap();
            assert_eq!(t.triangles().len(), n - 2);
            assert_eq!(t.diagonals().len(), n - 3);
            assert!((t.total_area() - poly.area()).abs() <= 1e-9 * poly.area());
            let g = dual_graph(&t);
            assert!(g.is_tree() && g.max_degree() <= 3);
        }
    }
}

#[test]
fn verifier_accepts_earclip_output() {
    for poly in corpus(100, 17) {
        let t = triangulate_earclip(&poly).unwrap();
        let r = verify_triangulation(&poly, &t);
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}

#[test]
fn monotone_500_gon_verifies() {
    let poly = random_star_polygon(500, 500);
    let t = triangulate_monotone(&poly).unwrap();
    let r = verify_triangulation(&poly, &t);
    assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
}

#[test]
fn random_30_gon() {
    let poly = random_star_polygon(30, 30);
    let t = triangulate_earclip(&poly).unwrap();
    assert_eq!((t.triangles().len(), t.diagonals().len()), (28, 27));
    assert!((t.total_area() - poly.area()).abs() <= 1e-9 * poly.area());
}

#[test]
fn earclip_is_deterministic() {
    let ring = random_star_ring(80, 4);
    let a = triangulate_earclip(&SimplePolygon::new(ring.clone()).unwrap()).unwrap();
    let b = triangulate_earclip(&SimplePolygon::new(ring).unwrap()).unwrap();
    assert_eq!(a.triangles(), b.triangles());
}

proptest! {
    #[test]
    fn orientation_is_antisymmetric(
        px in -100.0..100.0f64, py in -100.0..100.0f64,
        qx in -100.0..100.0f64, qy in -100.0..100.0f64,
        rx in -100.0..100.0f64, ry in -100.0..100.0f64,
    ) {
        let (p, q, r) = (Point2::new(px, py), Point2::new(qx, qy), Point2::new(rx, ry));
        let tol = Tolerance::for_points(1e-9, &[p, q, r]).unwrap();
        prop_assert_eq!(orientation(p, q, r, tol), orientation(p, r, q, tol).reversed());
    }

    #[test]
    fn gain_is_non_negative_and_zero_only_between(
        ax in -10.0..10.0f64, ay in -10.0..10.0f64,
        cx in -10.0..10.0f64, cy in -10.0..10.0f64,
        t in 0.0..1.0f64, off in -1.0..1.0f64,
    ) {
        let (a, c) = (Point2::new(ax, ay), Point2::new(cx, cy));
        let between = a + (c - a) * t;
        prop_assert!(trikit::geometry::triangle_inequality_gain(a, between, c) < 1e-12);
        let normal = Point2::new(-(c - a).y, (c - a).x);
        let b = between + normal * off;
        let gain = trikit::geometry::triangle_inequality_gain(a, b, c);
        prop_assert!(gain >= 0.0);
        let tol = Tolerance::for_points(1e-9, &[a, b, c]).unwrap();
        if orientation(a, b, c, tol) != Orientation::Collinear {
            prop_assert!(gain > 0.0);
        }
    }

    #[test]
    fn star_polygons_triangulate_with_both_methods(n in 3usize..120, seed in any::<u64>()) {
        let poly = random_star_polygon(n, seed);
        let e = triangulate_earclip(&poly).unwrap();
        let m = triangulate_monotone(&poly).unwrap();
        prop_assert_eq!(e.triangles().len(), m.triangles().len());
        prop_assert!((e.total_area() - m.total_area()).abs() <= 1e-9 * poly.area());
        prop_assert!(verify_triangulation(&poly, &m).all_passed());
    }
}

/// Histogram outline: unit-width columns of integer height on a flat base.
/// Produces many equal-y vertices and horizontal edges.
fn histogram(heights: &[u8]) -> SimplePolygon {
    let w = heights.len() as f64;
    let mut ring = vec![Point2::new(0.0, 0.0), Point2::new(w, 0.0)];
    for (i, &h) in heights.iter().enumerate().rev() {
        for p in [Point2::new(i as f64 + 1.0, f64::from(h)), Point2::new(i as f64, f64::from(h))] {
            if ring.last() != Some(&p) {
                ring.push(p);
            }
        }
    }
    SimplePolygon::new(ring).unwrap()
}

proptest! {
    #[test]
    fn histograms_triangulate_with_both_methods(heights in proptest::collection::vec(1u8..6, 1..30)) {
        let poly = histogram(&heights);
        for method in [Method::EarClip, Method::Monotone] {
            let t = triangulate(&poly, method).unwrap();
            let r = verify_triangulation(&poly, &t);
            prop_assert!(r.all_passed(), "{:?} {:?}", method, r.failures().collect::<Vec<_>>());
        }
    }
}
