//! Surface triangulation of box solids through planar cross-sections.
//!
//! A box is cut along a vertical diagonal plane into two triangular prisms
//! (or into parallel slabs). Each face of each piece is mapped into its own
//! 2D chart, triangulated there as a simple polygon, and lifted back. The
//! pieces keep their own copy of any cut face, so every piece is a closed
//! surface on its own.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point2, Point3, SimplePolygon};
use crate::report::VerificationReport;
use crate::triangulation::{triangulate_earclip, TriangulationError};

/// Relative tolerance for planarity, chart round trips, vertex merging and
/// area checks, scaled by the relevant diagonal.
pub const SOLID_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolidError {
    #[error("box max corner must exceed min corner on every axis")]
    InvalidBox,
    #[error("prism base triangle is degenerate")]
    DegeneratePrism,
    #[error("prism axis is parallel to its base plane")]
    AxisParallelToBase,
    #[error("face {face} is not planar (deviation {deviation:e})")]
    NonPlanarFace { face: usize, deviation: f64 },
    #[error("multi-section strategy needs at least 2 cuts, got {0}")]
    TooFewSections(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// Axis-aligned box. Named to avoid clashing with `std::boxed::Box`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxRecord", into = "BoxRecord")]
pub struct AxisBox {
    min: Point3,
    max: Point3,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct BoxRecord {
    min: Point3,
    max: Point3,
}

impl TryFrom<BoxRecord> for AxisBox {
    type Error = SolidError;
    fn try_from(r: BoxRecord) -> Result<Self, SolidError> {
        AxisBox::new(r.min, r.max)
    }
}

impl From<AxisBox> for BoxRecord {
    fn from(b: AxisBox) -> Self {
        BoxRecord { min: b.min, max: b.max }
    }
}

impl AxisBox {
    pub fn new(min: Point3, max: Point3) -> Result<Self, SolidError> {
        if !(min.is_finite() && max.is_finite() && max.x > min.x && max.y > min.y && max.z > min.z) {
            return Err(SolidError::InvalidBox);
        }
        Ok(Self { min, max })
    }

    pub fn unit_cube() -> Self {
        Self { min: Point3::new(0.0, 0.0, 0.0), max: Point3::new(1.0, 1.0, 1.0) }
    }

    pub fn min(&self) -> Point3 {
        self.min
    }

    pub fn max(&self) -> Point3 {
        self.max
    }

    pub fn extent(&self) -> Point3 {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }

    pub fn surface_area(&self) -> f64 {
        let e = self.extent();
        2.0 * (e.x * e.y + e.y * e.z + e.z * e.x)
    }

    fn corner(&self, i: usize, j: usize, k: usize) -> Point3 {
        let pick = |bit: usize, lo: f64, hi: f64| if bit == 0 { lo } else { hi };
        Point3::new(pick(i, self.min.x, self.max.x), pick(j, self.min.y, self.max.y), pick(k, self.min.z, self.max.z))
    }

    /// Six quadrilateral faces, counterclockwise seen from outside:
    /// bottom, top, front (min y), back, left (min x), right.
    pub fn faces(&self) -> Vec<Face> {
        let c = |i, j, k| self.corner(i, j, k);
        let quads = [
            [c(0, 0, 0), c(0, 1, 0), c(1, 1, 0), c(1, 0, 0)],
            [c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)],
            [c(0, 0, 0), c(1, 0, 0), c(1, 0, 1), c(0, 0, 1)],
            [c(0, 1, 0), c(0, 1, 1), c(1, 1, 1), c(1, 1, 0)],
            [c(0, 0, 0), c(0, 0, 1), c(0, 1, 1), c(0, 1, 0)],
            [c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)],
        ];
        quads.into_iter().enumerate().map(|(id, q)| Face { id, vertices: q.to_vec() }).collect()
    }

    /// `k` planes perpendicular to x, evenly spaced, giving `k + 1` slabs.
    pub fn slabs(&self, k: usize) -> Vec<AxisBox> {
        let dx = self.extent().x / (k + 1) as f64;
        (0..=k)
            .map(|i| {
                let x0 = self.min.x + dx * i as f64;
                let x1 = if i == k { self.max.x } else { self.min.x + dx * (i + 1) as f64 };
                AxisBox { min: Point3 { x: x0, ..self.min }, max: Point3 { x: x1, ..self.max } }
            })
            .collect()
    }
}

/// Planar polygonal face, counterclockwise around its outward normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub id: usize,
    pub vertices: Vec<Point3>,
}

impl Face {
    /// Newell normal; its length is twice the face area.
    pub fn area_vector(&self) -> Point3 {
        let v = &self.vertices;
        let n = v.len();
        (0..n).fold(Point3::default(), |acc, i| acc + v[i].cross(v[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.area_vector().norm()
    }

    pub fn unit_normal(&self) -> Option<Point3> {
        self.area_vector().normalized()
    }
}

/// Which pair of opposite vertical box edges the diagonal cut passes through.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutDiagonal {
    /// Through the edges at (min x, min y) and (max x, max y).
    #[default]
    Main,
    /// Through the edges at (max x, min y) and (min x, max y).
    Anti,
}

/// Triangular base extruded along an axis vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prism {
    base: [Point3; 3],
    axis: Point3,
}

impl Prism {
    /// The base winding is flipped if needed so its normal points along the axis.
    pub fn new(base: [Point3; 3], axis: Point3) -> Result<Self, SolidError> {
        let [a, b, c] = base;
        let normal = (b - a).cross(c - a);
        let scale = (b - a).norm().max((c - a).norm()).max((c - b).norm());
        if normal.norm() <= SOLID_RTOL * scale * scale {
            return Err(SolidError::DegeneratePrism);
        }
        let along = axis.dot(normal) / normal.norm();
        if along.abs() <= SOLID_RTOL * axis.norm().max(scale) {
            return Err(SolidError::AxisParallelToBase);
        }
        let base = if along > 0.0 { [a, b, c] } else { [a, c, b] };
        Ok(Self { base, axis })
    }

    pub fn base(&self) -> [Point3; 3] {
        self.base
    }

    pub fn axis(&self) -> Point3 {
        self.axis
    }

    /// Bottom triangle, top triangle, then the three side quadrilaterals.
    pub fn faces(&self) -> Vec<Face> {
        let [a, b, c] = self.base;
        let h = self.axis;
        let mut faces =
            vec![Face { id: 0, vertices: vec![a, c, b] }, Face { id: 1, vertices: vec![a + h, b + h, c + h] }];
        for (k, (p, q)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
            faces.push(Face { id: 2 + k, vertices: vec![p, q, q + h, p + h] });
        }
        faces
    }

    pub fn volume(&self) -> f64 {
        let [a, b, c] = self.base;
        0.5 * (b - a).cross(c - a).dot(self.axis).abs()
    }

    pub fn surface_area(&self) -> f64 {
        self.faces().iter().map(Face::area).sum()
    }

    /// All nine edge lengths, ascending.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let [a, b, c] = self.base;
        let base = [a.distance(b), b.distance(c), c.distance(a)];
        let h = self.axis.norm();
        let mut out: Vec<f64> = base.iter().chain(base.iter()).copied().chain([h; 3]).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Equal sorted edge-length multisets within `rtol` of the longest edge.
    pub fn is_congruent_to(&self, other: &Prism, rtol: f64) -> bool {
        let (a, b) = (self.edge_lengths(), other.edge_lengths());
        let scale = a.last().copied().unwrap_or(1.0).max(b.last().copied().unwrap_or(1.0));
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= rtol * scale)
    }
}

/// Cuts the box along the vertical plane through a pair of opposite
/// vertical edges.
pub fn slice_box(b: &AxisBox, cut: CutDiagonal) -> (Prism, Prism) {
    let z = b.min.z;
    let (lo, hi) = (b.min, b.max);
    let p = |x: f64, y: f64| Point3::new(x, y, z);
    let axis = Point3::new(0.0, 0.0, hi.z - lo.z);
    let (first, second) = match cut {
        CutDiagonal::Main => {
            ([p(lo.x, lo.y), p(hi.x, lo.y), p(hi.x, hi.y)], [p(lo.x, lo.y), p(hi.x, hi.y), p(lo.x, hi.y)])
        }
        CutDiagonal::Anti => {
            ([p(lo.x, lo.y), p(hi.x, lo.y), p(lo.x, hi.y)], [p(hi.x, lo.y), p(hi.x, hi.y), p(lo.x, hi.y)])
        }
    };
    let prism = |base| Prism::new(base, axis).expect("valid box yields valid prisms");
    (prism(first), prism(second))
}

/// A face mapped into 2D through an orthonormal in-plane frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceChart {
    pub face_id: usize,
    pub origin: Point3,
    pub u: Point3,
    pub v: Point3,
    pub polygon: SimplePolygon,
}

impl FaceChart {
    /// Frame: origin at the first vertex, `u` along the first edge, `v` the
    /// outward normal crossed with `u`, so the chart polygon is CCW.
    pub fn new(face: &Face) -> Result<Self, SolidError> {
        let verts = &face.vertices;
        let degenerate = SolidError::NonPlanarFace { face: face.id, deviation: f64::NAN };
        let origin = *verts.first().ok_or(degenerate.clone())?;
        let normal = face.unit_normal().ok_or(degenerate.clone())?;
        let u = verts.iter().find_map(|&p| (p - origin).normalized()).ok_or(degenerate)?;
        let v = normal.cross(u);
        let diag = verts.iter().map(|&p| p.distance(origin)).fold(0.0, f64::max);
        let deviation = verts.iter().map(|&p| (p - origin).dot(normal).abs()).fold(0.0, f64::max);
        if deviation > SOLID_RTOL * diag {
            return Err(SolidError::NonPlanarFace { face: face.id, deviation });
        }
        let flat = verts.iter().map(|&p| project(origin, u, v, p)).collect();
        Ok(Self { face_id: face.id, origin, u, v, polygon: SimplePolygon::new(flat)? })
    }

    pub fn project(&self, p: Point3) -> Point2 {
        project(self.origin, self.u, self.v, p)
    }

    pub fn lift(&self, q: Point2) -> Point3 {
        self.origin + self.u * q.x + self.v * q.y
    }
}

fn project(origin: Point3, u: Point3, v: Point3, p: Point3) -> Point2 {
    let d = p - origin;
    Point2::new(d.dot(u), d.dot(v))
}

pub fn face_charts(p: &Prism) -> Result<Vec<FaceChart>, SolidError> {
    p.faces().iter().map(FaceChart::new).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Strategy {
    /// One diagonal cut into two triangular prisms.
    #[default]
    SingleSection,
    /// `k` parallel cuts into `k + 1` slabs.
    MultiSection(usize),
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(Self::SingleSection),
            _ => s
                .strip_prefix("multi:")
                .and_then(|k| k.parse().ok())
                .map(Self::MultiSection)
                .ok_or_else(|| format!("strategy must be `single` or `multi:K`, got `{s}`")),
        }
    }
}

impl TryFrom<String> for Strategy {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> Self {
        s.to_string()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SingleSection => f.write_str("single"),
            Self::MultiSection(k) => write!(f, "multi:{k}"),
        }
    }
}

/// Closed pieces produced by a strategy, each as its face list.
pub fn decompose(b: &AxisBox, strategy: Strategy) -> Result<Vec<Vec<Face>>, SolidError> {
    match strategy {
        Strategy::SingleSection => {
            let (p, q) = slice_box(b, CutDiagonal::Main);
            Ok(vec![p.faces(), q.faces()])
        }
        Strategy::MultiSection(k) if k < 2 => Err(SolidError::TooFewSections(k)),
        Strategy::MultiSection(k) => Ok(b.slabs(k).iter().map(AxisBox::faces).collect()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceId {
    pub solid: usize,
    pub face: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
    pub provenance: Vec<FaceId>,
    /// Sum of the areas of the source faces the mesh was built from.
    pub source_area: f64,
}

impl SurfaceMesh {
    pub fn triangle_area(&self, t: [usize; 3]) -> f64 {
        let [a, b, c] = t.map(|i| self.vertices[i]);
        0.5 * (b - a).cross(c - a).norm()
    }

    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .filter(|t| t.iter().all(|&i| i < self.vertices.len()))
            .map(|&t| self.triangle_area(t))
            .sum()
    }

    /// Wavefront OBJ text, 1-based face indices.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
        }
        for t in &self.triangles {
            out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
        }
        out
    }

    fn bbox_diagonal(&self) -> f64 {
        let mut lo = Point3 { x: f64::INFINITY, y: f64::INFINITY, z: f64::INFINITY };
        let mut hi = Point3 { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY, z: f64::NEG_INFINITY };
        for v in &self.vertices {
            lo = Point3 { x: lo.x.min(v.x), y: lo.y.min(v.y), z: lo.z.min(v.z) };
            hi = Point3 { x: hi.x.max(v.x), y: hi.y.max(v.y), z: hi.z.max(v.z) };
        }
        if self.vertices.is_empty() {
            1.0
        } else {
            hi.distance(lo)
        }
    }
}

struct MeshBuilder {
    mesh: SurfaceMesh,
    merge_eps: f64,
}

impl MeshBuilder {
    fn vertex(&mut self, p: Point3) -> usize {
        if let Some(i) = self.mesh.vertices.iter().position(|&q| q.distance(p) <= self.merge_eps) {
            return i;
        }
        self.mesh.vertices.push(p);
        self.mesh.vertices.len() - 1
    }

    fn add_solid(&mut self, solid: usize, faces: &[Face]) -> Result<(), SolidError> {
        for face in faces {
            let chart = FaceChart::new(face)?;
            let t = triangulate_earclip(&chart.polygon)?;
            let flat = chart.polygon.vertices();
            for tri in t.triangles() {
                let ids = tri.map(|i| self.vertex(chart.lift(flat[i])));
                self.mesh.triangles.push(ids);
                self.mesh.provenance.push(FaceId { solid, face: face.id });
            }
            self.mesh.source_area += face.area();
        }
        Ok(())
    }
}

/// Meshes each box independently; solid ids run consecutively across boxes.
pub fn triangulate_composite(boxes: &[AxisBox], strategy: Strategy) -> Result<SurfaceMesh, SolidError> {
    let scale = boxes.iter().map(AxisBox::diagonal).fold(0.0, f64::max);
    let mut builder = MeshBuilder {
        mesh: SurfaceMesh { vertices: Vec::new(), triangles: Vec::new(), provenance: Vec::new(), source_area: 0.0 },
        merge_eps: SOLID_RTOL * scale,
    };
    let mut solid = 0;
    for b in boxes {
        for faces in decompose(b, strategy)? {
            builder.add_solid(solid, &faces)?;
            solid += 1;
        }
    }
    Ok(builder.mesh)
}

pub fn triangulate_solid_surface(b: &AxisBox, strategy: Strategy) -> Result<SurfaceMesh, SolidError> {
    triangulate_composite(std::slice::from_ref(b), strategy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecompositionCost {
    pub triangles: usize,
    pub faces: usize,
}

/// Face and triangle counts from face vertex counts alone: an n-gon face
/// always triangulates into n - 2 triangles.
pub fn decomposition_cost(b: &AxisBox, strategy: Strategy) -> Result<DecompositionCost, SolidError> {
    let pieces = decompose(b, strategy)?;
    let faces = pieces.iter().map(Vec::len).sum();
    let triangles = pieces.iter().flatten().map(|f| f.vertices.len() - 2).sum();
    Ok(DecompositionCost { triangles, faces })
}

/// Checks `indices_valid`, `non_degenerate`, `edge_manifold` (each edge in
/// exactly two triangles of its solid), `consistent_orientation` (no
/// directed edge repeated within a solid) and `area` (triangle area sum vs
/// source face area).
pub fn verify_mesh(m: &SurfaceMesh) -> VerificationReport {
    use std::collections::HashMap;

    let mut report = VerificationReport::new();
    let nv = m.vertices.len();
    let valid: Vec<(usize, [usize; 3])> =
        m.triangles.iter().enumerate().filter(|(_, t)| t.iter().all(|&i| i < nv)).map(|(k, &t)| (k, t)).collect();
    report.push(
        "indices_valid",
        valid.len() == m.triangles.len() && m.provenance.len() == m.triangles.len(),
        format!("{} of {} triangles reference existing vertices", valid.len(), m.triangles.len()),
    );

    let diag = m.bbox_diagonal();
    let degenerate = valid
        .iter()
        .filter(|(_, t)| {
            let [a, b, c] = t.map(|i| m.vertices[i]);
            let longest = a.distance(b).max(b.distance(c)).max(c.distance(a));
            t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || (b - a).cross(c - a).norm() <= SOLID_RTOL * diag * longest
        })
        .count();
    report.push("non_degenerate", degenerate == 0, format!("{degenerate} degenerate triangles"));

    let solid_of = |k: usize| m.provenance.get(k).map_or(usize::MAX, |f| f.solid);
    let mut undirected: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut directed: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for &(k, [a, b, c]) in &valid {
        let s = solid_of(k);
        for (x, y) in [(a, b), (b, c), (c, a)] {
            *undirected.entry((s, x.min(y), x.max(y))).or_default() += 1;
            *directed.entry((s, x, y)).or_default() += 1;
        }
    }
    let bad_edges = undirected.values().filter(|&&c| c != 2).count();
    report.push(
        "edge_manifold",
        bad_edges == 0,
        format!("{bad_edges} edges not shared by exactly two triangles of their solid"),
    );
    let repeated = directed.values().filter(|&&c| c > 1).count();
    report.push("consistent_orientation", repeated == 0, format!("{repeated} directed edges used more than once"));

    let total = m.total_area();
    let rel = (total - m.source_area).abs() / m.source_area.max(f64::MIN_POSITIVE);
    report.push(
        "area",
        rel <= SOLID_RTOL,
        format!("mesh area {total}, source area {}, relative error {rel:e}", m.source_area),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn unit_cube_slices_into_half_volume_prisms() {
        let (p, q) = slice_box(&AxisBox::unit_cube(), CutDiagonal::Main);
        assert!((p.volume() - 0.5).abs() < 1e-15);
        assert!((q.volume() - 0.5).abs() < 1e-15);
        // two half-squares, two unit squares and the 1 x sqrt2 cut rectangle
        assert!((p.surface_area() - (3.0 + SQRT2)).abs() < 1e-12);
        assert!((q.surface_area() - (3.0 + SQRT2)).abs() < 1e-12);
        let sum = p.surface_area() + q.surface_area();
        assert!((sum - (6.0 + 2.0 * SQRT2)).abs() < 1e-12);
        assert!(p.is_congruent_to(&q, 1e-9));
    }

    #[test]
    fn anti_diagonal_cut_also_halves() {
        let b = AxisBox::new(Point3::new(1.0, 2.0, 3.0), Point3::new(4.0, 3.0, 5.0)).unwrap();
        let (p, q) = slice_box(&b, CutDiagonal::Anti);
        assert!((p.volume() + q.volume() - b.volume()).abs() <= 1e-12 * b.volume());
        assert!(p.is_congruent_to(&q, 1e-9));
    }

    #[test]
    fn prism_faces_point_outward() {
        let (p, _) = slice_box(&AxisBox::unit_cube(), CutDiagonal::Main);
        let centroid = {
            let [a, b, c] = p.base();
            (a + b + c) * (1.0 / 3.0) + p.axis() * 0.5
        };
        for f in p.faces() {
            let n = f.unit_normal().unwrap();
            assert!((f.vertices[0] - centroid).dot(n) > 0.0, "face {} points inward", f.id);
        }
    }

    #[test]
    fn charts_of_unit_prism() {
        let (p, _) = slice_box(&AxisBox::unit_cube(), CutDiagonal::Main);
        let charts = face_charts(&p).unwrap();
        assert_eq!(charts.len(), 5);
        let sizes: Vec<usize> = charts.iter().map(|c| c.polygon.len()).collect();
        assert_eq!(sizes, vec![3, 3, 4, 4, 4]);
        let mut areas: Vec<f64> = charts.iter().map(|c| c.polygon.area()).collect();
        areas.sort_by(f64::total_cmp);
        for (a, e) in areas.iter().zip([0.5, 0.5, 1.0, 1.0, SQRT2]) {
            assert!((a - e).abs() < 1e-12);
        }
        for (chart, face) in charts.iter().zip(p.faces()) {
            for &v in &face.vertices {
                assert!(chart.lift(chart.project(v)).distance(v) <= 1e-9 * SQRT2 * 1.0);
            }
        }
    }

    #[test]
    fn non_planar_face_is_rejected() {
        let face = Face {
            id: 7,
            vertices: vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.3),
                Point3::new(0.0, 1.0, 0.0),
            ],
        };
        assert!(matches!(FaceChart::new(&face), Err(SolidError::NonPlanarFace { face: 7, .. })));
    }

    #[test]
    fn degenerate_prisms() {
        let flat = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0)];
        assert_eq!(Prism::new(flat, Point3::new(0.0, 0.0, 1.0)), Err(SolidError::DegeneratePrism));
        let base = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        assert_eq!(Prism::new(base, Point3::new(1.0, 1.0, 0.0)), Err(SolidError::AxisParallelToBase));
        let flipped = Prism::new(base, Point3::new(0.0, 0.0, -2.0)).unwrap();
        assert!((flipped.volume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_and_multi_section_counts() {
        let cube = AxisBox::unit_cube();
        let single = triangulate_solid_surface(&cube, Strategy::SingleSection).unwrap();
        assert_eq!(single.triangles.len(), 16);
        assert!((single.total_area() - 2.0 * (3.0 + SQRT2)).abs() < 1e-12);
        assert!(verify_mesh(&single).all_passed(), "{:?}", verify_mesh(&single));
        assert_eq!(
            decomposition_cost(&cube, Strategy::SingleSection).unwrap(),
            DecompositionCost { triangles: 16, faces: 10 }
        );

        let multi = triangulate_solid_surface(&cube, Strategy::MultiSection(3)).unwrap();
        assert_eq!(multi.triangles.len(), 48);
        assert!(verify_mesh(&multi).all_passed());
        assert_eq!(
            decomposition_cost(&cube, Strategy::MultiSection(3)).unwrap(),
            DecompositionCost { triangles: 48, faces: 24 }
        );
        assert!(matches!(decomposition_cost(&cube, Strategy::MultiSection(1)), Err(SolidError::TooFewSections(1))));
    }

    #[test]
    fn deleted_triangle_opens_three_edges() {
        let mut m = triangulate_solid_surface(&AxisBox::unit_cube(), Strategy::SingleSection).unwrap();
        m.triangles.remove(5);
        m.provenance.remove(5);
        let r = verify_mesh(&m);
        assert!(!r.passed("edge_manifold"));
        assert!(r.check("edge_manifold").unwrap().detail.starts_with("3 edges"));
        assert!(r.passed("non_degenerate") && r.passed("indices_valid") && r.passed("consistent_orientation"));
    }

    #[test]
    fn duplicated_triangle_overshares_edges() {
        let mut m = triangulate_solid_surface(&AxisBox::unit_cube(), Strategy::SingleSection).unwrap();
        m.triangles.push(m.triangles[0]);
        m.provenance.push(m.provenance[0]);
        let r = verify_mesh(&m);
        assert!(!r.passed("edge_manifold"));
        assert!(r.check("edge_manifold").unwrap().detail.starts_with("3 edges"));
    }

    #[test]
    fn tampered_source_area_fails_only_area() {
        let mut m = triangulate_solid_surface(&AxisBox::unit_cube(), Strategy::SingleSection).unwrap();
        m.source_area *= 1.01;
        let r = verify_mesh(&m);
        assert_eq!(r.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), vec!["area"]);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("single".parse::<Strategy>().unwrap(), Strategy::SingleSection);
        assert_eq!("multi:4".parse::<Strategy>().unwrap(), Strategy::MultiSection(4));
        assert!("multi:x".parse::<Strategy>().is_err());
        assert_eq!(Strategy::MultiSection(3).to_string(), "multi:3");
    }

    #[test]
    fn obj_is_one_based() {
        let m = triangulate_solid_surface(&AxisBox::unit_cube(), Strategy::SingleSection).unwrap();
        let obj = m.to_obj();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), m.vertices.len());
        assert!(obj.lines().filter(|l| l.starts_with("f ")).all(|l| !l.split(' ').any(|t| t == "0")));
    }
}
