//! Plain SVG renderings of the library's outputs.

use std::fmt::Write;

use crate::circle::{inscribed_polygon, Circle, CircleError};
use crate::geometry::{Point2, SimplePolygon};
use crate::localization::{AccuracyMap, PositionEstimate, RangeSet, TowerScene};
use crate::solid::{FaceChart, SurfaceMesh};
use crate::triangulation::Triangulation;

const PAD: f64 = 20.0;

/// World-to-pixel mapping with y pointing up and a uniform scale.
struct Canvas {
    min: Point2,
    scale: f64,
    width: f64,
    height: f64,
    body: String,
}

impl Canvas {
    fn fit(points: impl IntoIterator<Item = Point2>, width: f64) -> Self {
        let (mut lo, mut hi) =
            (Point2 { x: f64::INFINITY, y: f64::INFINITY }, Point2 { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY });
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.is_finite() {
            lo = Point2::default();
            hi = Point2::new(1.0, 1.0);
        }
        let span = hi - lo;
        let extent = span.x.max(span.y).max(f64::MIN_POSITIVE);
        let scale = (width - 2.0 * PAD) / extent;
        Self { min: lo, scale, width, height: span.y * scale + 2.0 * PAD, body: String::new() }
    }

    fn px(&self, p: Point2) -> (f64, f64) {
        (PAD + (p.x - self.min.x) * self.scale, self.height - PAD - (p.y - self.min.y) * self.scale)
    }

    fn polygon(&mut self, pts: &[Point2], style: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(self.body, r#"<polygon points="{}" {style}/>"#, coords.join(" "));
    }

    fn line(&mut self, a: Point2, b: Point2, style: &str) {
        let ((x1, y1), (x2, y2)) = (self.px(a), self.px(b));
        let _ = writeln!(self.body, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#);
    }

    fn circle(&mut self, c: Point2, r_world: f64, style: &str) {
        let (x, y) = self.px(c);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" {style}/>"#, r_world * self.scale);
    }

    fn dot(&mut self, c: Point2, r_px: f64, style: &str) {
        let (x, y) = self.px(c);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r_px:.2}" {style}/>"#);
    }

    fn text(&mut self, at: Point2, label: &str) {
        self.text_line(at, label, 0);
    }

    /// Label stacked `line` rows below the default position, for points that coincide.
    fn text_line(&mut self, at: Point2, label: &str, line: usize) {
        let (x, y) = self.px(at);
        let y = y + 13.0 * line as f64;
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            x + 4.0,
            y - 4.0,
            escape(label)
        );
    }

    fn finish(self, title: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n<title>{t}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{b}</svg>\n",
            w = self.width,
            h = self.height,
            t = escape(title),
            b = self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const OUTLINE: &str = r##"fill="#eef3fb" stroke="#1f3b73" stroke-width="2""##;
const DIAGONAL: &str = r##"stroke="#c0392b" stroke-width="1.2" stroke-dasharray="5,3""##;

/// Polygon outline, numbered vertices, and the diagonals of a triangulation.
pub fn triangulation_svg(poly: &SimplePolygon, t: Option<&Triangulation>) -> String {
    let mut c = Canvas::fit(poly.vertices().iter().copied(), 480.0);
    c.polygon(poly.vertices(), OUTLINE);
    if let Some(t) = t {
        for d in t.diagonals() {
            c.line(poly.vertex(d.i), poly.vertex(d.j), DIAGONAL);
        }
    }
    if poly.len() <= 60 {
        for (i, &v) in poly.vertices().iter().enumerate() {
            c.dot(v, 2.5, r##"fill="#1f3b73""##);
            c.text(v, &i.to_string());
        }
    }
    let title = match t {
        Some(t) => format!("{}-gon, {} triangles, {} diagonals", poly.len(), t.triangles().len(), t.diagonals().len()),
        None => format!("{}-gon", poly.len()),
    };
    c.finish(&title)
}

/// One panel per vertex count: the circle with its inscribed polygon fanned
/// from vertex 0.
pub fn circle_svg(circle: &Circle, counts: &[usize]) -> Result<String, CircleError> {
    let r = circle.radius();
    let gap = 0.4 * r;
    let panels = counts.len().max(1) as f64;
    let bounds = [Point2::new(-r, -r), Point2::new(panels * (2.0 * r + gap) - gap - r, r)];
    let mut c = Canvas::fit(bounds, 180.0 * panels);
    for (k, &n) in counts.iter().enumerate() {
        let shift = Point2::new(k as f64 * (2.0 * r + gap), 0.0) - circle.center();
        let moved = Circle::new(Point2::new(k as f64 * (2.0 * r + gap), 0.0), r)?;
        let poly = inscribed_polygon(circle, n, std::f64::consts::FRAC_PI_2)?;
        let pts: Vec<Point2> = poly.vertices().iter().map(|&p| p + shift).collect();
        c.circle(moved.center(), r, r##"fill="none" stroke="#7f8c8d" stroke-width="1.5""##);
        c.polygon(&pts, OUTLINE);
        for &q in &pts[2..pts.len() - 1] {
            c.line(pts[0], q, DIAGONAL);
        }
        c.text(moved.center() + Point2::new(-0.2 * r, -1.25 * r), &format!("n = {n}"));
    }
    Ok(c.finish("inscribed polygons"))
}

/// Flattened face charts laid out left to right, one row per solid, with
/// each face's triangles drawn from the mesh.
pub fn mesh_net_svg(solids: &[Vec<FaceChart>], mesh: &SurfaceMesh) -> String {
    let gap = 0.25;
    let mut placed: Vec<(usize, usize, Point2, &FaceChart)> = Vec::new();
    let mut y = 0.0;
    for (s, charts) in solids.iter().enumerate() {
        let mut x = 0.0;
        let mut row_height: f64 = 0.0;
        for chart in charts {
            let (lo, hi) = bounds(chart.polygon.vertices());
            placed.push((s, chart.face_id, Point2::new(x, y) - lo, chart));
            x += hi.x - lo.x + gap;
            row_height = row_height.max(hi.y - lo.y);
        }
        y -= row_height + gap;
    }
    let all = placed.iter().flat_map(|(_, _, off, ch)| ch.polygon.vertices().iter().map(move |&p| p + *off));
    let mut c = Canvas::fit(all.collect::<Vec<_>>(), 900.0);
    for &(s, f, off, chart) in &placed {
        let pts: Vec<Point2> = chart.polygon.vertices().iter().map(|&p| p + off).collect();
        c.polygon(&pts, OUTLINE);
        for (k, tri) in mesh.triangles.iter().enumerate() {
            let prov = mesh.provenance[k];
            if (prov.solid, prov.face) != (s, f) {
                continue;
            }
            let flat: Vec<Point2> = tri.iter().map(|&i| chart.project(mesh.vertices[i]) + off).collect();
            for e in 0..3 {
                c.line(flat[e], flat[(e + 1) % 3], r##"stroke="#c0392b" stroke-width="0.8""##);
            }
        }
        let (lo, _) = bounds(&pts);
        c.text(lo, &format!("s{s} f{f}"));
    }
    c.finish(&format!("face net, {} triangles", mesh.triangles.len()))
}

fn bounds(pts: &[Point2]) -> (Point2, Point2) {
    pts.iter().fold(
        (Point2 { x: f64::INFINITY, y: f64::INFINITY }, Point2 { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY }),
        |(lo, hi), p| (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y))),
    )
}

/// Towers with their range circles, plus any estimates and an optional truth.
pub fn towers_svg(
    scene: &TowerScene,
    ranges: Option<&RangeSet>,
    estimates: &[(&str, &PositionEstimate)],
    truth: Option<Point2>,
) -> String {
    let mut pts = scene.positions();
    if let Some(r) = ranges {
        for t in scene.towers() {
            let d = r.get(&t.id).unwrap_or(0.0);
            pts.push(t.pos + Point2::new(d, d));
            pts.push(t.pos - Point2::new(d, d));
        }
    }
    pts.extend(estimates.iter().map(|(_, e)| e.position));
    pts.extend(truth);
    let mut c = Canvas::fit(pts, 560.0);
    let hull = scene.positions();
    c.polygon(&hull, r##"fill="none" stroke="#95a5a6" stroke-dasharray="2,2""##);
    for t in scene.towers() {
        if let Some(d) = ranges.and_then(|r| r.get(&t.id)) {
            c.circle(t.pos, d, r##"fill="none" stroke="#2980b9" stroke-opacity="0.6""##);
        }
        c.dot(t.pos, 5.0, r##"fill="#2c3e50""##);
        c.text(t.pos, &t.id);
    }
    for (k, (label, e)) in estimates.iter().enumerate() {
        c.dot(e.position, 4.0, r##"fill="#c0392b""##);
        c.text_line(e.position, label, k);
    }
    if let Some(p) = truth {
        c.dot(p, 4.0, r##"fill="none" stroke="#27ae60" stroke-width="2""##);
        c.text_line(p, "truth", estimates.len());
    }
    c.finish("tower ranges and estimates")
}

/// Colour-coded cells of an accuracy map (analytic metric, or Monte Carlo
/// RMSE when `use_rmse`), with the towers on top.
pub fn heatmap_svg(map: &AccuracyMap, scene: &TowerScene, use_rmse: bool) -> String {
    let value = |cell: &crate::localization::AccuracyCell| if use_rmse { cell.rmse } else { cell.analytic };
    let vals: Vec<f64> = map.cells.iter().filter_map(value).filter(|v| v.is_finite()).collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let half = map.step * 0.5;
    let mut pts: Vec<Point2> = map.cells.iter().map(|c| c.position).collect();
    pts.push(map.region.min - Point2::new(half, half));
    pts.push(map.region.max + Point2::new(half, half));
    pts.extend(scene.positions());
    let mut c = Canvas::fit(pts, 560.0);
    for cell in &map.cells {
        let p = cell.position;
        let corners = [
            p + Point2::new(-half, -half),
            p + Point2::new(half, -half),
            p + Point2::new(half, half),
            p + Point2::new(-half, half),
        ];
        let fill = match value(cell) {
            // log scale keeps the near-field gradations visible
            Some(v) if v.is_finite() && hi > lo && lo > 0.0 => ramp(((v / lo).ln() / (hi / lo).ln()).clamp(0.0, 1.0)),
            Some(v) if v.is_finite() && hi > lo => ramp(((v - lo) / (hi - lo)).clamp(0.0, 1.0)),
            Some(_) => ramp(0.0),
            None => "#7f8c8d".to_string(),
        };
        c.polygon(&corners, &format!(r#"fill="{fill}" stroke="none""#));
    }
    for t in scene.towers() {
        c.dot(t.pos, 5.0, r##"fill="#2c3e50" stroke="white""##);
        c.text(t.pos, &t.id);
    }
    let what = if use_rmse { "Monte Carlo RMSE" } else { "analytic error" };
    c.finish(&format!("{what}, sigma {}, range {lo:.3}..{hi:.3}", map.sigma))
}

/// Blue (0) to red (1).
fn ramp(t: f64) -> String {
    let r = (40.0 + 200.0 * t) as u8;
    let g = (90.0 + 100.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
    let b = (220.0 - 190.0 * t) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}
