//! Points, tolerance-aware predicates and the [`SimplePolygon`] ring.
//!
//! Every predicate takes a [`Tolerance`] whose effective width is a relative
//! epsilon scaled by the bounding-box diagonal of the input it was built from.
//! Predicates snap to the degenerate answer (collinear, on-boundary) inside
//! that band; nothing here is exact arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance applied to the bounding-box diagonal.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("vertex {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("a polygon needs at least 3 vertices, got {count}")]
    TooFewVertices { count: usize },
    #[error("vertices {first} and {second} coincide")]
    DuplicateVertex { first: usize, second: usize },
    #[error("ring is not simple: {0}")]
    NotSimple(SimplicityViolation),
    #[error("triangle is degenerate (area below tolerance)")]
    DegenerateTriangle,
    #[error("relative tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    /// Panics on non-finite input; use [`Point2::try_new`] for untrusted data.
    pub fn new(x: f64, y: f64) -> Self {
        Self::try_new(x, y).expect("Point2 coordinates must be finite")
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeometryError::NonFinite { index: 0 })
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { x: self.x + rhs.x, y: self.y + rhs.y }
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { x: self.x - rhs.x, y: self.y - rhs.y }
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self { x: self.x * k, y: self.y * k }
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { x: -self.x, y: -self.y }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    /// Panics on non-finite input; use [`Point3::try_new`] for untrusted data.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self::try_new(x, y, z).expect("Point3 coordinates must be finite")
    }

    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Self { x, y, z })
        } else {
            Err(GeometryError::NonFinite { index: 0 })
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self { x: self.y * o.z - self.z * o.y, y: self.z * o.x - self.x * o.z, z: self.x * o.y - self.y * o.x }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    pub fn xy(self) -> Point2 {
        Point2 { x: self.x, y: self.y }
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Add for Point3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { x: self.x + rhs.x, y: self.y + rhs.y, z: self.z + rhs.z }
    }
}

impl Sub for Point3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { x: self.x - rhs.x, y: self.y - rhs.y, z: self.z - rhs.z }
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self { x: self.x * k, y: self.y * k, z: self.z * k }
    }
}

/// Relative tolerance bound to the scale of a particular input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    epsilon_rel: f64,
    scale: f64,
}

impl Tolerance {
    pub fn new(epsilon_rel: f64, scale: f64) -> Result<Self, GeometryError> {
        if !(epsilon_rel.is_finite() && epsilon_rel > 0.0) {
            return Err(GeometryError::InvalidTolerance(epsilon_rel));
        }
        let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
        Ok(Self { epsilon_rel, scale })
    }

    /// Tolerance scaled by the bounding-box diagonal of `points`.
    pub fn for_points(epsilon_rel: f64, points: &[Point2]) -> Result<Self, GeometryError> {
        Self::new(epsilon_rel, bbox_diagonal(points))
    }

    pub fn epsilon_rel(&self) -> f64 {
        self.epsilon_rel
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Absolute length below which two quantities are considered equal.
    pub fn effective(&self) -> f64 {
        self.epsilon_rel * self.scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { epsilon_rel: DEFAULT_EPSILON, scale: 1.0 }
    }
}

pub fn bbox_diagonal(points: &[Point2]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let (mut lo, mut hi) = (*first, *first);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    hi.distance(lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Self::CounterClockwise => Self::Clockwise,
            Self::Clockwise => Self::CounterClockwise,
            Self::Collinear => Self::Collinear,
        }
    }
}

/// Turn direction of `p -> q -> r`.
///
/// The cross product `(q - p) x (r - p)` is an area; it is compared against
/// the effective tolerance times the longest of the three edges, so the
/// collinear band is a distance band around each edge line.
pub fn orientation(p: Point2, q: Point2, r: Point2, tol: Tolerance) -> Orientation {
    let cross = (q - p).cross(r - p);
    let longest = p.distance(q).max(q.distance(r)).max(r.distance(p));
    if cross.abs() <= tol.effective() * longest {
        Orientation::Collinear
    } else if cross > 0.0 {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}

/// Signed shoelace area of an open ring (positive when counterclockwise).
///
/// Coordinates are taken relative to the first vertex to limit cancellation
/// for rings far from the origin. Each cross product is formed with an
/// fma-corrected difference of products and the terms are summed with
/// Neumaier compensation, so the area is accurate to a few ulps even for
/// rings with many thousands of vertices. Differences between areas of
/// nearby rings (such as successive inscribed polygons) stay meaningful.
pub fn ring_signed_area(ring: &[Point2]) -> f64 {
    let Some(&origin) = ring.first() else {
        return 0.0;
    };
    let n = ring.len();
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for i in 0..n {
        let (a, b) = (ring[i] - origin, ring[(i + 1) % n] - origin);
        let term = diff_of_products(a.x, b.y, a.y, b.x);
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    (sum + comp) * 0.5
}

/// `a * b - c * d` with the rounding error of `c * d` recovered by fma.
fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let cd = c * d;
    let err = (-c).mul_add(d, cd);
    a.mul_add(b, -cd) + err
}

pub fn signed_area(poly: &SimplePolygon) -> f64 {
    ring_signed_area(poly.vertices())
}

/// Closed-segment intersection test with tolerance-aware touching.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2, tol: Tolerance) -> bool {
    let o1 = orientation(a, b, c, tol);
    let o2 = orientation(a, b, d, tol);
    let o3 = orientation(c, d, a, tol);
    let o4 = orientation(c, d, b, tol);
    if o1 != o2
        && o3 != o4
        && o1 != Orientation::Collinear
        && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear
        && o4 != Orientation::Collinear
    {
        return true;
    }
    (o1 == Orientation::Collinear && on_segment(a, b, c, tol))
        || (o2 == Orientation::Collinear && on_segment(a, b, d, tol))
        || (o3 == Orientation::Collinear && on_segment(c, d, a, tol))
        || (o4 == Orientation::Collinear && on_segment(c, d, b, tol))
}

/// Interiors of `ab` and `cd` cross at a single point strictly inside both.
pub fn segments_cross_properly(a: Point2, b: Point2, c: Point2, d: Point2, tol: Tolerance) -> bool {
    let o1 = orientation(a, b, c, tol);
    let o2 = orientation(a, b, d, tol);
    let o3 = orientation(c, d, a, tol);
    let o4 = orientation(c, d, b, tol);
    o1 != Orientation::Collinear
        && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear
        && o4 != Orientation::Collinear
        && o1 != o2
        && o3 != o4
}

/// `p` (assumed collinear with `ab`) lies within the closed segment, padded by the tolerance.
fn on_segment(a: Point2, b: Point2, p: Point2, tol: Tolerance) -> bool {
    let eps = tol.effective();
    p.x >= a.x.min(b.x) - eps && p.x <= a.x.max(b.x) + eps && p.y >= a.y.min(b.y) - eps && p.y <= a.y.max(b.y) + eps
}

/// Why a vertex ring fails to be a simple polygon. Edges are named by
/// their endpoint indices, edge `k` running from vertex `k` to `k + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimplicityViolation {
    DuplicateVertex { first: usize, second: usize },
    EdgeIntersection { first: (usize, usize), second: (usize, usize) },
}

impl fmt::Display for SimplicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateVertex { first, second } => {
                write!(f, "vertices {first} and {second} coincide")
            }
            Self::EdgeIntersection { first, second } => {
                write!(f, "edge ({}, {}) intersects edge ({}, {})", first.0, first.1, second.0, second.1)
            }
        }
    }
}

/// Brute-force O(n²) simplicity check of an implicitly closed ring.
///
/// Non-adjacent edges may not touch at all. Adjacent edges may only share
/// their common vertex; a fold-back where one edge runs along the other is
/// reported as an intersection.
pub fn is_simple(vertices: &[Point2], tol: Tolerance) -> Result<(), SimplicityViolation> {
    let n = vertices.len();
    let eps = tol.effective();
    for i in 0..n {
        for j in i + 1..n {
            if vertices[i].distance(vertices[j]) <= eps {
                return Err(SimplicityViolation::DuplicateVertex { first: i, second: j });
            }
        }
    }
    let edge = |k: usize| (k, (k + 1) % n);
    for i in 0..n {
        let (a, b) = edge(i);
        for j in i + 1..n {
            let (c, d) = edge(j);
            let violation = SimplicityViolation::EdgeIntersection { first: (a, b), second: (c, d) };
            let adjacent = b == c || d == a;
            if adjacent {
                // shared vertex is b when j == i + 1, a when (j, i) wrap around
                let (shared, other_a, other_b) = if b == c { (b, a, d) } else { (a, b, c) };
                let (p, q, s) = (vertices[shared], vertices[other_a], vertices[other_b]);
                if orientation(p, q, s, tol) == Orientation::Collinear && (q - p).dot(s - p) > 0.0 {
                    return Err(violation);
                }
            } else if segments_intersect(vertices[a], vertices[b], vertices[c], vertices[d], tol) {
                return Err(violation);
            }
        }
    }
    Ok(())
}

/// Every turn is strictly counterclockwise and the ring winds exactly once.
/// Such a ring is simple; checked in O(n).
fn is_strictly_convex_ccw(vertices: &[Point2], tol: Tolerance) -> bool {
    let n = vertices.len();
    let mut turning = 0.0;
    for i in 0..n {
        let (p, q, r) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
        if orientation(p, q, r, tol) != Orientation::CounterClockwise {
            return false;
        }
        let (u, v) = (q - p, r - q);
        turning += u.cross(v).atan2(u.dot(v));
    }
    (turning - std::f64::consts::TAU).abs() < 1e-6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Containment {
    Inside,
    OnBoundary,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle2 {
    pub a: Point2,
    pub b: Point2,
    pub c: Point2,
}

impl Triangle2 {
    pub fn new(a: Point2, b: Point2, c: Point2, tol: Tolerance) -> Result<Self, GeometryError> {
        if orientation(a, b, c, tol) == Orientation::Collinear {
            return Err(GeometryError::DegenerateTriangle);
        }
        Ok(Self { a, b, c })
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(self.c - self.a)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn centroid(&self) -> Point2 {
        (self.a + self.b + self.c) * (1.0 / 3.0)
    }
}

/// Classifies `p` against `t` with three orientation tests.
pub fn point_in_triangle(p: Point2, t: &Triangle2, tol: Tolerance) -> Containment {
    let (a, b, c) = if t.signed_area() >= 0.0 { (t.a, t.b, t.c) } else { (t.a, t.c, t.b) };
    let turns = [orientation(a, b, p, tol), orientation(b, c, p, tol), orientation(c, a, p, tol)];
    if turns.contains(&Orientation::Clockwise) {
        Containment::Outside
    } else if turns.contains(&Orientation::Collinear) {
        Containment::OnBoundary
    } else {
        Containment::Inside
    }
}

/// `|AB| + |BC| - |AC|`: how much longer the detour through `b` is than the
/// direct segment. Zero exactly when `b` lies on segment `ac`.
pub fn triangle_inequality_gain(a: Point2, b: Point2, c: Point2) -> f64 {
    (a.distance(b) + b.distance(c) - a.distance(c)).max(0.0)
}

/// Crossing-number point-in-polygon test; boundary points report
/// [`Containment::OnBoundary`].
pub fn point_in_ring(p: Point2, ring: &[Point2], tol: Tolerance) -> Containment {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if orientation(a, b, p, tol) == Orientation::Collinear && on_segment(a, b, p, tol) {
            return Containment::OnBoundary;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// A Jordan polygon: a simple, counterclockwise ring with no duplicate
/// vertices and no straight-through collinear vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplePolygon {
    #[serde(serialize_with = "serialize_ring")]
    vertices: Vec<Point2>,
    #[serde(skip)]
    tol: Tolerance,
}

fn serialize_ring<S: serde::Serializer>(ring: &[Point2], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ring.iter().map(|p| [p.x, p.y]))
}

impl SimplePolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        Self::with_epsilon(vertices, DEFAULT_EPSILON)
    }

    /// Validates and normalizes a ring.
    ///
    /// Order of work: finiteness, duplicates (hard error, since merging would
    /// change the vertex count), collinear straight-through vertices (merged),
    /// simplicity, then orientation (reversed to CCW keeping vertex 0 first).
    pub fn with_epsilon(vertices: Vec<Point2>, epsilon_rel: f64) -> Result<Self, GeometryError> {
        if let Some(index) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices { count: vertices.len() });
        }
        let tol = Tolerance::for_points(epsilon_rel, &vertices)?;
        check_duplicates(&vertices, tol)?;
        let mut ring = merge_collinear(vertices, tol);
        if ring.len() < 3 {
            return Err(GeometryError::TooFewVertices { count: ring.len() });
        }
        let convex_ccw = is_strictly_convex_ccw(&ring, tol);
        if !convex_ccw {
            ring[1..].reverse();
            let convex_cw = is_strictly_convex_ccw(&ring, tol);
            ring[1..].reverse();
            if !convex_cw {
                is_simple(&ring, tol).map_err(GeometryError::NotSimple)?;
            }
        }
        if ring_signed_area(&ring) < 0.0 {
            ring[1..].reverse();
        }
        Ok(Self { vertices: ring, tol })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i]
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn area(&self) -> f64 {
        signed_area(self)
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    /// Vertices `i` and `j` are joined by a polygon edge.
    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.next(i) == j || self.next(j) == i
    }

    pub fn contains(&self, p: Point2) -> Containment {
        point_in_ring(p, &self.vertices, self.tol)
    }
}

impl TryFrom<Vec<Point2>> for SimplePolygon {
    type Error = GeometryError;
    fn try_from(v: Vec<Point2>) -> Result<Self, GeometryError> {
        Self::new(v)
    }
}

impl<'de> Deserialize<'de> for SimplePolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            vertices: Vec<Point2>,
        }
        let raw = Raw::deserialize(d)?;
        SimplePolygon::new(raw.vertices).map_err(serde::de::Error::custom)
    }
}

fn check_duplicates(vertices: &[Point2], tol: Tolerance) -> Result<(), GeometryError> {
    let eps = tol.effective();
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&i, &j| vertices[i].x.total_cmp(&vertices[j].x));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if vertices[j].x - vertices[i].x > eps {
                break;
            }
            if vertices[i].distance(vertices[j]) <= eps {
                return Err(GeometryError::DuplicateVertex { first: i.min(j), second: i.max(j) });
            }
        }
    }
    Ok(())
}

/// Drops vertices lying strictly between their neighbours on a straight
/// line. Fold-back spikes are kept so the simplicity check rejects them.
fn merge_collinear(mut ring: Vec<Point2>, tol: Tolerance) -> Vec<Point2> {
    let mut changed = true;
    while changed && ring.len() > 3 {
        changed = false;
        let mut i = 0;
        while i < ring.len() && ring.len() > 3 {
            let n = ring.len();
            let (p, q, r) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            if orientation(p, q, r, tol) == Orientation::Collinear && (q - p).dot(r - q) > 0.0 {
                ring.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
    }
    ring
}
