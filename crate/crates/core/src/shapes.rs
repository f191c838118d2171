//! Polygon generators for fixtures, examples and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point2, SimplePolygon};

/// Random star-shaped polygon around the origin.
///
/// Vertex `k` sits at angle `(k + jitter) / n * 2π` with jitter in
/// `[0.1, 0.9)` and radius in `[0.2, 1.0)`, so angles are strictly
/// increasing and the ring is simple by construction.
pub fn random_star_polygon(n: usize, seed: u64) -> SimplePolygon {
    SimplePolygon::new(random_star_ring(n, seed)).expect("star-shaped ring is simple")
}

/// The raw vertex ring behind [`random_star_polygon`].
pub fn random_star_ring(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let jitter: f64 = rng.random_range(0.1..0.9);
            let radius: f64 = rng.random_range(0.2..1.0);
            let angle = std::f64::consts::TAU * (k as f64 + jitter) / n as f64;
            Point2::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect()
}

/// Regular polygon on the unit circle, vertex 0 at angle 0.
pub fn regular_polygon(n: usize) -> SimplePolygon {
    SimplePolygon::new(
        (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                Point2::new(a.cos(), a.sin())
            })
            .collect(),
    )
    .expect("regular polygon is simple")
}

/// Axis-aligned rectangle `[0, w] x [0, h]`.
pub fn rectangle(w: f64, h: f64) -> SimplePolygon {
    SimplePolygon::new(vec![Point2::new(0.0, 0.0), Point2::new(w, 0.0), Point2::new(w, h), Point2::new(0.0, h)])
        .expect("rectangle with positive sides is simple")
}

/// Comb with `teeth` downward notches cut into a bar; every notch tip is a
/// reflex vertex.
pub fn comb(teeth: usize) -> SimplePolygon {
    let mut ring = vec![Point2::new(0.0, 0.0), Point2::new(2.0 * teeth as f64, 0.0)];
    for t in (0..teeth).rev() {
        let x = 2.0 * t as f64;
        ring.push(Point2::new(x + 2.0, 3.0));
        ring.push(Point2::new(x + 1.0, 1.0));
    }
    ring.push(Point2::new(0.0, 3.0));
    SimplePolygon::new(ring).expect("comb is simple")
}
