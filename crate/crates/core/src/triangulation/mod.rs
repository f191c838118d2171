//! Diagonal triangulation of simple polygons.
//!
//! Two algorithms produce the same kind of output: quadratic ear clipping
//! ([`triangulate_earclip`]) and sweep-line monotone decomposition
//! ([`triangulate_monotone`]). Every triangulation of an n-vertex polygon
//! built here uses n - 3 diagonals and n - 2 triangles, and its dual graph is
//! a tree of maximum degree three. [`verify_triangulation`] checks those
//! properties for arbitrary candidate triangulations.

mod earclip;
mod monotone;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    orientation, point_in_triangle, segments_cross_properly, segments_intersect, Containment, Orientation,
    SimplePolygon, Triangle2,
};
use crate::report::VerificationReport;

pub use earclip::{find_ears, is_ear, triangulate_earclip, EarReport};
pub use monotone::triangulate_monotone;

/// Relative tolerance for area conservation checks.
pub const AREA_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriangulationError {
    #[error("no ear found with {remaining} vertices left; input is not a valid simple polygon")]
    NoEar { remaining: usize },
    #[error("monotone decomposition failed: {0}")]
    MonotoneFailure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "earclip")]
    EarClip,
    #[serde(rename = "monotone")]
    Monotone,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::EarClip => "earclip",
            Self::Monotone => "monotone",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "earclip" => Ok(Self::EarClip),
            "monotone" => Ok(Self::Monotone),
            other => Err(format!("unknown triangulation algorithm `{other}`")),
        }
    }
}

/// Segment between two non-adjacent polygon vertices, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Diagonal {
    pub i: usize,
    pub j: usize,
}

impl Diagonal {
    pub fn new(a: usize, b: usize) -> Self {
        Self { i: a.min(b), j: a.max(b) }
    }
}

impl From<[usize; 2]> for Diagonal {
    fn from([a, b]: [usize; 2]) -> Self {
        Self::new(a, b)
    }
}

impl From<Diagonal> for [usize; 2] {
    fn from(d: Diagonal) -> Self {
        [d.i, d.j]
    }
}

/// Triangles and diagonals over the vertex indices of `source`.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    source: SimplePolygon,
    triangles: Vec<[usize; 3]>,
    diagonals: Vec<Diagonal>,
    method: Method,
}

/// On-disk form: `{"method": "...", "triangles": [[i,j,k],...], "diagonals": [[i,j],...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationRecord {
    pub method: Method,
    pub triangles: Vec<[usize; 3]>,
    pub diagonals: Vec<Diagonal>,
}

impl Triangulation {
    /// Builds a triangulation from triangles, deriving diagonals as the
    /// triangle edges that are not polygon edges.
    pub(crate) fn from_triangles(source: SimplePolygon, triangles: Vec<[usize; 3]>, method: Method) -> Self {
        let triangles: Vec<[usize; 3]> = triangles.into_iter().map(|t| canonical_triangle(&source, t)).collect();
        let diagonals = interior_edges(&source, &triangles);
        Self { source, triangles, diagonals, method }
    }

    /// Assembles an unverified candidate. Nothing is checked; pass the
    /// result to [`verify_triangulation`].
    pub fn from_parts(
        source: SimplePolygon,
        triangles: Vec<[usize; 3]>,
        diagonals: Vec<Diagonal>,
        method: Method,
    ) -> Self {
        Self { source, triangles, diagonals, method }
    }

    pub fn from_record(source: SimplePolygon, record: TriangulationRecord) -> Self {
        Self::from_parts(source, record.triangles, record.diagonals, record.method)
    }

    pub fn to_record(&self) -> TriangulationRecord {
        TriangulationRecord {
            method: self.method,
            triangles: self.triangles.clone(),
            diagonals: self.diagonals.clone(),
        }
    }

    pub fn source(&self) -> &SimplePolygon {
        &self.source
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn diagonals(&self) -> &[Diagonal] {
        &self.diagonals
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn triangle(&self, k: usize) -> Triangle2 {
        let [a, b, c] = self.triangles[k];
        let v = self.source.vertices();
        Triangle2 { a: v[a], b: v[b], c: v[c] }
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|k| self.triangle(k).area()).sum()
    }
}

/// Dispatches to the chosen algorithm.
pub fn triangulate(poly: &SimplePolygon, method: Method) -> Result<Triangulation, TriangulationError> {
    match method {
        Method::EarClip => triangulate_earclip(poly),
        Method::Monotone => triangulate_monotone(poly),
    }
}

/// Counterclockwise winding, smallest index first.
fn canonical_triangle(poly: &SimplePolygon, [a, b, c]: [usize; 3]) -> [usize; 3] {
    let v = poly.vertices();
    let [a, b, c] = if (v[b] - v[a]).cross(v[c] - v[a]) < 0.0 { [a, c, b] } else { [a, b, c] };
    if a <= b && a <= c {
        [a, b, c]
    } else if b <= a && b <= c {
        [b, c, a]
    } else {
        [c, a, b]
    }
}

fn interior_edges(poly: &SimplePolygon, triangles: &[[usize; 3]]) -> Vec<Diagonal> {
    let set: BTreeSet<Diagonal> = triangles
        .iter()
        .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
        .filter(|&(x, y)| !poly.is_edge(x, y))
        .map(|(x, y)| Diagonal::new(x, y))
        .collect();
    set.into_iter().collect()
}

/// One node per triangle; an edge wherever two triangles share a side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualGraph {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.node_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.node_count && self.is_connected()
    }
}

pub fn dual_graph(t: &Triangulation) -> DualGraph {
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, &[a, b, c]) in t.triangles.iter().enumerate() {
        for (x, y) in [(a, b), (b, c), (c, a)] {
            by_edge.entry((x.min(y), x.max(y))).or_default().push(k);
        }
    }
    let mut edges: Vec<(usize, usize)> = by_edge
        .values()
        .flat_map(|tris| {
            tris.iter().enumerate().flat_map(move |(i, &p)| tris[i + 1..].iter().map(move |&q| (p.min(q), p.max(q))))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    DualGraph { node_count: t.triangles.len(), edges }
}

/// Checks a candidate triangulation of `poly`.
///
/// Report entries: `indices`, `triangle_count`, `diagonal_count`,
/// `non_degenerate`, `area_conservation`, `interior_disjointness`,
/// `diagonals_valid`, `diagonals_match_triangles`.
pub fn verify_triangulation(poly: &SimplePolygon, t: &Triangulation) -> VerificationReport {
    let mut report = VerificationReport::new();
    let n = poly.len();
    let tol = poly.tolerance();
    let v = poly.vertices();

    let bad_index = t
        .triangles
        .iter()
        .position(|tri| tri.iter().any(|&i| i >= n) || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]);
    report.push(
        "indices",
        bad_index.is_none(),
        match bad_index {
            Some(k) => format!("triangle {k} has an out-of-range or repeated index"),
            None => "all triangle indices valid".into(),
        },
    );
    let triangles: Vec<[usize; 3]> = t.triangles.iter().copied().filter(|tri| tri.iter().all(|&i| i < n)).collect();
    let tri = |k: usize| {
        let [a, b, c] = triangles[k];
        Triangle2 { a: v[a], b: v[b], c: v[c] }
    };

    report.push(
        "triangle_count",
        t.triangles.len() + 2 == n,
        format!("{} triangles, expected {}", t.triangles.len(), n - 2),
    );
    report.push(
        "diagonal_count",
        t.diagonals.len() + 3 == n,
        format!("{} diagonals, expected {}", t.diagonals.len(), n - 3),
    );

    let degenerate = (0..triangles.len()).find(|&k| {
        let tr = tri(k);
        orientation(tr.a, tr.b, tr.c, tol) == Orientation::Collinear
    });
    report.push(
        "non_degenerate",
        degenerate.is_none(),
        match degenerate {
            Some(k) => format!("triangle {k} has zero area"),
            None => "no degenerate triangles".into(),
        },
    );

    let total: f64 = (0..triangles.len()).map(|k| tri(k).area()).sum();
    let area = poly.area();
    let rel = (total - area).abs() / area;
    report.push(
        "area_conservation",
        rel <= AREA_RTOL,
        format!("triangle area sum {total}, polygon area {area}, relative error {rel:e}"),
    );

    let overlap = first_overlap(&(0..triangles.len()).map(tri).collect::<Vec<_>>(), poly);
    report.push(
        "interior_disjointness",
        overlap.is_none(),
        match overlap {
            Some((p, q)) => format!("triangles {p} and {q} overlap"),
            None => "triangle interiors pairwise disjoint".into(),
        },
    );

    let invalid = t.diagonals.iter().find(|d| !diagonal_is_valid(poly, d.i, d.j));
    report.push(
        "diagonals_valid",
        invalid.is_none(),
        match invalid {
            Some(d) => format!("diagonal ({}, {}) is not interior to the polygon", d.i, d.j),
            None => "every diagonal lies inside the polygon".into(),
        },
    );

    let listed: BTreeSet<Diagonal> = t.diagonals.iter().copied().collect();
    let implied: BTreeSet<Diagonal> = interior_edges(poly, &triangles).into_iter().collect();
    report.push(
        "diagonals_match_triangles",
        listed == implied,
        format!("{} listed, {} implied by triangle edges", listed.len(), implied.len()),
    );
    report
}

fn first_overlap(tris: &[Triangle2], poly: &SimplePolygon) -> Option<(usize, usize)> {
    let tol = poly.tolerance();
    let bbox = |t: &Triangle2| {
        (
            t.a.x.min(t.b.x).min(t.c.x),
            t.a.y.min(t.b.y).min(t.c.y),
            t.a.x.max(t.b.x).max(t.c.x),
            t.a.y.max(t.b.y).max(t.c.y),
        )
    };
    let boxes: Vec<_> = tris.iter().map(bbox).collect();
    for p in 0..tris.len() {
        for q in p + 1..tris.len() {
            let (a, b) = (boxes[p], boxes[q]);
            if a.2 < b.0 || b.2 < a.0 || a.3 < b.1 || b.3 < a.1 {
                continue;
            }
            if triangles_overlap(&tris[p], &tris[q], tol) {
                return Some((p, q));
            }
        }
    }
    None
}

/// Interiors intersect: an edge pair crosses properly, or a vertex or the
/// centroid of one lies strictly inside the other.
fn triangles_overlap(s: &Triangle2, t: &Triangle2, tol: crate::geometry::Tolerance) -> bool {
    let se = [(s.a, s.b), (s.b, s.c), (s.c, s.a)];
    let te = [(t.a, t.b), (t.b, t.c), (t.c, t.a)];
    if se.iter().any(|&(a, b)| te.iter().any(|&(c, d)| segments_cross_properly(a, b, c, d, tol))) {
        return true;
    }
    let inside = |p, tri: &Triangle2| point_in_triangle(p, tri, tol) == Containment::Inside;
    [s.a, s.b, s.c, s.centroid()].into_iter().any(|p| inside(p, t))
        || [t.a, t.b, t.c, t.centroid()].into_iter().any(|p| inside(p, s))
}

/// Segment `ij` joins non-adjacent vertices, touches the boundary only at
/// its endpoints and has its midpoint strictly inside.
pub fn diagonal_is_valid(poly: &SimplePolygon, i: usize, j: usize) -> bool {
    let n = poly.len();
    if i >= n || j >= n || i == j || poly.is_edge(i, j) {
        return false;
    }
    let tol = poly.tolerance();
    let v = poly.vertices();
    let (a, b) = (v[i], v[j]);
    for k in 0..n {
        let l = poly.next(k);
        let touches_i = k == i || l == i;
        let touches_j = k == j || l == j;
        if touches_i || touches_j {
            // an incident edge may not run along the diagonal
            let (shared, other) = if k == i || k == j { (k, l) } else { (l, k) };
            let (from, to) = if shared == i { (a, b) } else { (b, a) };
            let o = v[other];
            if orientation(from, to, o, tol) == Orientation::Collinear && (to - from).dot(o - from) > 0.0 {
                return false;
            }
        } else if segments_intersect(a, b, v[k], v[l], tol) {
            return false;
        }
    }
    poly.contains((a + b) * 0.5) == Containment::Inside
}
