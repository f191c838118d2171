//! Batch command-line front end: JSON in, JSON/CSV/SVG/OBJ out.
//!
//! Every run writes a report holding the command, a full echo of the
//! resolved inputs (file contents, not paths), the result, and the checks.
//! `verify` replays a report from its echo and compares the outcome.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or the
//! computation itself fails, 2 on malformed input or unusable paths.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::circle::{coverage_ratio, marginal_gain_curve, min_vertices_for_ratio, Circle};
use crate::geometry::{Point2, Point3, SimplePolygon};
use crate::localization::{
    accuracy_map, project_to_2d, simulate_ranges, simulate_ranges_3d, solve_position, two_round_locate, Projection,
    RangeSet, Region, TowerScene, TowerScene3,
};
use crate::report::{Check, VerificationReport};
use crate::solid::{
    decompose, decomposition_cost, slice_box, triangulate_composite, verify_mesh, AxisBox, CutDiagonal, FaceChart,
    Strategy, SurfaceMesh, SOLID_RTOL,
};
use crate::svg;
use crate::triangulation::{
    dual_graph, find_ears, triangulate, verify_triangulation, Method, Triangulation, TriangulationRecord,
};

pub const TOOL: &str = "trikit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input content, bad flags, or unreadable/unwritable paths.
    #[error("{0}")]
    Input(String),
    /// Valid input on which the computation failed.
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Compute(_) => 1,
        }
    }
}

fn input_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{context}: {e}"))
}

fn compute_err(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "trikit",
    version,
    about = "Triangulation, circle approximation, solid meshing and range localization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate a simple polygon read from `{"vertices": [[x, y], ...]}`.
    Triangulate(TriangulateArgs),
    /// Coverage of the unit (or given) circle by inscribed regular polygons.
    CircleApprox(CircleArgs),
    /// Slice boxes into prisms or slabs and mesh their surfaces.
    Slice(SliceArgs),
    /// Estimate a position from tower ranges.
    Locate(LocateArgs),
    /// Predicted and simulated position error over a grid.
    AccuracyMap(AccuracyArgs),
    /// Replay a report, or check a triangulation record against a polygon.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write an SVG figure here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TriangulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "earclip")]
    pub algo: Method,
    /// Relative tolerance, scaled by the polygon's bounding-box diagonal.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CircleArgs {
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    /// Also report the smallest vertex count reaching this coverage ratio.
    #[arg(long)]
    pub target: Option<f64>,
    /// Write the `n,ratio,gain` table here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// One box `{"min": [x,y,z], "max": [x,y,z]}` or an array of boxes.
    #[arg(long)]
    pub input: PathBuf,
    /// `single` or `multi:K`.
    #[arg(long, default_value = "single")]
    pub strategy: Strategy,
    #[arg(long)]
    pub obj: Option<PathBuf>,
    /// Write the full mesh as JSON here.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LocateArgs {
    /// Scene `{"towers": [{"id": .., "pos": [x, y] or [x, y, z]}]}`.
    #[arg(long)]
    pub input: PathBuf,
    /// Ranges `{"sigma": s, "seed": k, "ranges": {id: r}}`; simulated from
    /// `--truth` when omitted.
    #[arg(long)]
    pub ranges: Option<PathBuf>,
    /// True position `x,y` (or `x,y,z`), used to simulate ranges and score the estimate.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    pub truth: Option<Coords>,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub two_round: bool,
    /// Height handling for 3D scenes: `dropz` or `heightcorrected:Z`.
    #[arg(long)]
    pub mode: Option<Projection>,
    /// Starting point `x,y`; tower centroid when omitted.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    pub init: Option<Coords>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AccuracyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `xmin,ymin,xmax,ymax`; tower bounding box padded by its own size when omitted.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    pub region: Option<Coords>,
    /// Grid spacing; a twentieth of the region's longer side when omitted.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Monte Carlo trials per grid point; 0 for the analytic metric only.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the `x,y,analytic,rmse` table here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A report to replay, or (with `--triangulation`) a polygon.
    #[arg(long)]
    pub input: PathBuf,
    /// Triangulation record `{"method", "triangles", "diagonals"}` to check against `--input`.
    #[arg(long)]
    pub triangulation: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Comma-separated coordinates such as `3.5,-2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coords(pub Vec<f64>);

fn parse_coords(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        })
        .collect::<Result<_, _>>()
        .map(Coords)
}

/// Resolved inputs of one run. This is what a report echoes and what
/// `verify` replays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "inputs", rename_all = "kebab-case")]
pub enum Job {
    Triangulate {
        vertices: Vec<Point2>,
        algo: Method,
        tolerance: f64,
    },
    CircleApprox {
        radius: f64,
        n_max: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<f64>,
    },
    Slice {
        boxes: Vec<AxisBox>,
        strategy: Strategy,
    },
    Locate {
        scene: Scene,
        ranges: RangeSet,
        two_round: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Projection>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        init: Option<Point2>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truth: Option<Vec<f64>>,
    },
    AccuracyMap {
        scene: TowerScene,
        region: Region,
        step: f64,
        sigma: f64,
        trials: usize,
        seed: u64,
    },
    VerifyTriangulation {
        vertices: Vec<Point2>,
        record: TriangulationRecord,
        tolerance: f64,
    },
}

/// Planar or elevated tower scene, told apart by coordinate count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scene {
    Planar(TowerScene),
    Elevated(TowerScene3),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch; ignored when comparing reports.
    pub timestamp: u64,
    #[serde(flatten)]
    pub job: Job,
    pub result: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    /// JSON value without the timestamp, for replay comparison.
    pub fn comparable(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timestamp");
        }
        v
    }
}

/// Files a run may write besides the report.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub svg: Option<String>,
    pub csv: Option<String>,
    pub obj: Option<String>,
    pub mesh: Option<String>,
}

pub struct Outcome {
    pub report: Report,
    pub artifacts: Artifacts,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| input_err(&path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| input_err(&path.display().to_string(), e))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| input_err(&format!("cannot write {}", path.display()), e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonFile {
    vertices: Vec<Point2>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BoxesFile {
    One(AxisBox),
    Many(Vec<AxisBox>),
}

fn point_of(coords: &[f64], what: &str) -> Result<Point2, CliError> {
    match coords {
        [x, y] | [x, y, _] => Ok(Point2::new(*x, *y)),
        _ => Err(CliError::Input(format!("{what} needs 2 or 3 comma-separated numbers"))),
    }
}

/// Reads files and resolves defaults into a [`Job`].
pub fn resolve(command: &Command) -> Result<Job, CliError> {
    Ok(match command {
        Command::Triangulate(a) => {
            let f: PolygonFile = read_json(&a.input)?;
            Job::Triangulate { vertices: f.vertices, algo: a.algo, tolerance: a.tolerance }
        }
        Command::CircleApprox(a) => Job::CircleApprox { radius: a.radius, n_max: a.n_max, target: a.target },
        Command::Slice(a) => {
            let boxes = match read_json::<BoxesFile>(&a.input)? {
                BoxesFile::One(b) => vec![b],
                BoxesFile::Many(v) => v,
            };
            Job::Slice { boxes, strategy: a.strategy }
        }
        Command::Locate(a) => {
            let scene: Scene = read_json(&a.input)
                .map_err(|e| CliError::Input(format!("{e} (expected towers with [x, y] or [x, y, z] positions)")))?;
            let ranges = match (&a.ranges, &a.truth) {
                (Some(path), _) => read_json::<RangeSet>(path)?,
                (None, Some(t)) => simulate_for(&scene, &t.0, a.sigma, a.seed)?,
                (None, None) => return Err(CliError::Input("locate needs --ranges or --truth".into())),
            };
            let init = a.init.as_ref().map(|c| point_of(&c.0, "--init")).transpose()?;
            Job::Locate {
                scene,
                ranges,
                two_round: a.two_round,
                mode: a.mode,
                init,
                truth: a.truth.as_ref().map(|c| c.0.clone()),
            }
        }
        Command::AccuracyMap(a) => {
            let scene: TowerScene = read_json(&a.input)?;
            let region = match a.region.as_ref().map(|c| c.0.as_slice()) {
                Some([x0, y0, x1, y1]) => Region { min: Point2::new(*x0, *y0), max: Point2::new(*x1, *y1) },
                Some(_) => return Err(CliError::Input("--region needs xmin,ymin,xmax,ymax".into())),
                None => default_region(&scene),
            };
            let span = region.max - region.min;
            let step = a.step.unwrap_or(span.x.max(span.y) / 20.0);
            Job::AccuracyMap { scene, region, step, sigma: a.sigma, trials: a.trials, seed: a.seed }
        }
        Command::Verify(a) => match &a.triangulation {
            Some(t) => {
                let f: PolygonFile = read_json(&a.input)?;
                Job::VerifyTriangulation { vertices: f.vertices, record: read_json(t)?, tolerance: a.tolerance }
            }
            None => {
                return Err(CliError::Input("verify without --triangulation replays a report; use replay()".into()))
            }
        },
    })
}

fn simulate_for(scene: &Scene, truth: &[f64], sigma: f64, seed: u64) -> Result<RangeSet, CliError> {
    let r = match (scene, truth) {
        (Scene::Planar(s), [x, y]) => simulate_ranges(s, Point2::new(*x, *y), sigma, seed),
        (Scene::Elevated(s), [x, y, z]) => simulate_ranges_3d(s, Point3::new(*x, *y, *z), sigma, seed),
        (Scene::Elevated(s), [x, y]) => simulate_ranges_3d(s, Point3::new(*x, *y, 0.0), sigma, seed),
        _ => return Err(CliError::Input("--truth must have 2 coordinates for a planar scene".into())),
    };
    r.map_err(|e| input_err("--sigma", e))
}

fn default_region(scene: &TowerScene) -> Region {
    let pts = scene.positions();
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = hi - lo;
    Region { min: lo - pad, max: hi + pad }
}

/// Runs a job; the report's timestamp is filled in by the caller.
pub fn execute(job: &Job) -> Result<(Value, VerificationReport, Artifacts), CliError> {
    match job {
        Job::Triangulate { vertices, algo, tolerance } => run_triangulate(vertices, *algo, *tolerance),
        Job::CircleApprox { radius, n_max, target } => run_circle(*radius, *n_max, *target),
        Job::Slice { boxes, strategy } => run_slice(boxes, *strategy),
        Job::Locate { scene, ranges, two_round, mode, init, truth } => {
            run_locate(scene, ranges, *two_round, *mode, *init, truth.as_deref())
        }
        Job::AccuracyMap { scene, region, step, sigma, trials, seed } => {
            run_accuracy(scene, *region, *step, *sigma, *trials, *seed)
        }
        Job::VerifyTriangulation { vertices, record, tolerance } => {
            let poly = polygon(vertices, *tolerance)?;
            let t = Triangulation::from_record(poly.clone(), record.clone());
            let checks = verify_triangulation(&poly, &t);
            Ok((json!({ "vertex_count": poly.len() }), checks, Artifacts::default()))
        }
    }
}

fn polygon(vertices: &[Point2], tolerance: f64) -> Result<SimplePolygon, CliError> {
    SimplePolygon::with_epsilon(vertices.to_vec(), tolerance).map_err(|e| input_err("polygon", e))
}

fn run_triangulate(
    vertices: &[Point2],
    algo: Method,
    tolerance: f64,
) -> Result<(Value, VerificationReport, Artifacts), CliError> {
    let poly = polygon(vertices, tolerance)?;
    let t = triangulate(&poly, algo).map_err(compute_err)?;
    let mut checks = verify_triangulation(&poly, &t);
    let dual = dual_graph(&t);
    checks.push("dual_tree", dual.is_tree(), format!("{} nodes, {} edges", dual.node_count, dual.edges.len()));
    checks.push("dual_max_degree", dual.max_degree() <= 3, format!("max degree {}", dual.max_degree()));
    let ears = find_ears(&poly);
    checks.push("two_ears", poly.len() < 4 || ears.len() >= 2, format!("{} ears", ears.len()));
    let record = t.to_record();
    let result = json!({
        "vertices": poly.vertices(),
        "method": record.method,
        "triangle_count": record.triangles.len(),
        "diagonal_count": record.diagonals.len(),
        "triangles": record.triangles,
        "diagonals": record.diagonals,
        "polygon_area": poly.area(),
        "triangulation_area": t.total_area(),
        "ears": ears.ear_indices,
    });
    let artifacts = Artifacts { svg: Some(svg::triangulation_svg(&poly, Some(&t))), ..Artifacts::default() };
    Ok((result, checks, artifacts))
}

fn run_circle(
    radius: f64,
    n_max: usize,
    target: Option<f64>,
) -> Result<(Value, VerificationReport, Artifacts), CliError> {
    let c = Circle::new(Point2::default(), radius).map_err(|e| input_err("--radius", e))?;
    let curve = marginal_gain_curve(&c, n_max).map_err(|e| input_err("--n-max", e))?;
    let mut checks = VerificationReport::new();
    checks.push("ratios_increasing", curve.ratios_strictly_increasing(), "ratio(n) > ratio(n-1) for every n");
    checks.push("gains_decreasing", curve.gains_strictly_decreasing(), "gain(n) < gain(n-1) for every n");
    checks.push("below_one", curve.all_below_one(), "0 < ratio < 1");
    let argmax = curve.argmax_gain();
    checks.push("largest_gain_three_to_four", argmax == Some(4), format!("largest gain on the step to n = {argmax:?}"));
    let worst = curve
        .entries
        .iter()
        .map(|e| {
            let n = e.n as f64;
            let exact = n / std::f64::consts::TAU * (std::f64::consts::TAU / n).sin();
            (e.ratio - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    checks.push("closed_form", worst <= 1e-12, format!("max relative deviation {worst:e}"));
    let mut result = json!({ "entries": curve.entries, "argmax_gain_n": argmax });
    if let Some(t) = target {
        let n = min_vertices_for_ratio(&c, t).map_err(|e| input_err("--target", e))?;
        let hit = coverage_ratio(&c, n).map_err(compute_err)?;
        let prev = if n > 3 { coverage_ratio(&c, n - 1).map_err(compute_err)? } else { 0.0 };
        checks.push("target_minimal", hit >= t && prev < t, format!("ratio({n}) = {hit}, ratio({}) = {prev}", n - 1));
        result["min_vertices_for_target"] = json!(n);
    }
    let counts: Vec<usize> = [3, 4, 6, 8, 16].into_iter().filter(|&k| k <= n_max).collect();
    let artifacts = Artifacts {
        svg: Some(svg::circle_svg(&c, &counts).map_err(compute_err)?),
        csv: Some(curve.to_csv()),
        ..Artifacts::default()
    };
    Ok((result, checks, artifacts))
}

fn run_slice(boxes: &[AxisBox], strategy: Strategy) -> Result<(Value, VerificationReport, Artifacts), CliError> {
    if boxes.is_empty() {
        return Err(CliError::Input("no boxes given".into()));
    }
    let sol_err = |e: crate::solid::SolidError| match e {
        crate::solid::SolidError::TooFewSections(_) => input_err("--strategy", e),
        other => compute_err(other),
    };
    let mesh = triangulate_composite(boxes, strategy).map_err(sol_err)?;
    let mut checks = verify_mesh(&mesh);
    let (mut cost_t, mut cost_f) = (0, 0);
    for b in boxes {
        let c = decomposition_cost(b, strategy).map_err(sol_err)?;
        cost_t += c.triangles;
        cost_f += c.faces;
    }
    let faces_built = mesh.provenance.iter().collect::<std::collections::BTreeSet<_>>().len();
    checks.push(
        "cost_matches_mesh",
        cost_t == mesh.triangles.len() && cost_f == faces_built,
        format!("predicted {cost_t} triangles / {cost_f} faces, built {} / {faces_built}", mesh.triangles.len()),
    );
    let mut prisms = Vec::new();
    if strategy == Strategy::SingleSection {
        for b in boxes {
            let (p, q) = slice_box(b, CutDiagonal::Main);
            let congruent = p.is_congruent_to(&q, SOLID_RTOL);
            let vol_err = (p.volume() + q.volume() - b.volume()).abs() / b.volume();
            checks.push("prisms_congruent", congruent, "sorted edge lengths agree");
            checks.push("volume_conserved", vol_err <= SOLID_RTOL, format!("relative error {vol_err:e}"));
            prisms.push(json!({
                "volumes": [p.volume(), q.volume()],
                "surface_areas": [p.surface_area(), q.surface_area()],
                "edge_lengths": p.edge_lengths(),
            }));
        }
    }
    let result = json!({
        "triangle_count": mesh.triangles.len(),
        "face_count": faces_built,
        "vertex_count": mesh.vertices.len(),
        "total_area": mesh.total_area(),
        "source_area": mesh.source_area,
        "cost": { "triangles": cost_t, "faces": cost_f },
        "prisms": prisms,
    });
    let charts = net_charts(boxes, strategy)?;
    let artifacts = Artifacts {
        svg: Some(svg::mesh_net_svg(&charts, &mesh)),
        obj: Some(mesh.to_obj()),
        mesh: Some(serde_json::to_string_pretty(&mesh).expect("mesh serializes") + "\n"),
        ..Artifacts::default()
    };
    Ok((result, checks, artifacts))
}

fn net_charts(boxes: &[AxisBox], strategy: Strategy) -> Result<Vec<Vec<FaceChart>>, CliError> {
    let mut out = Vec::new();
    for b in boxes {
        for faces in decompose(b, strategy).map_err(compute_err)? {
            out.push(faces.iter().map(FaceChart::new).collect::<Result<_, _>>().map_err(compute_err)?);
        }
    }
    Ok(out)
}

fn run_locate(
    scene: &Scene,
    ranges: &RangeSet,
    two_round: bool,
    mode: Option<Projection>,
    init: Option<Point2>,
    truth: Option<&[f64]>,
) -> Result<(Value, VerificationReport, Artifacts), CliError> {
    let (flat, ranges) = match scene {
        Scene::Planar(s) => {
            if mode.is_some() {
                return Err(CliError::Input("--mode applies to scenes with heights only".into()));
            }
            (s.clone(), ranges.clone())
        }
        Scene::Elevated(s) => {
            project_to_2d(s, ranges, mode.unwrap_or(Projection::DropZ)).map_err(|e| input_err("ranges", e))?
        }
    };
    ranges.check_matches(flat.towers().iter().map(|t| t.id.as_str())).map_err(|e| input_err("ranges", e))?;
    let truth = truth.map(|t| point_of(t, "--truth")).transpose()?;
    let mut checks = VerificationReport::new();
    let (result, estimates) = if two_round {
        let two = two_round_locate(&flat, &ranges).map_err(compute_err)?;
        checks.push("three_towers_in_round_two", two.second.towers_used.len() == 3, two.second.towers_used.join(","));
        let est = vec![("round 1", two.first.clone()), ("round 2", two.second.clone())];
        (serde_json::to_value(&two).expect("estimates serialize"), est)
    } else {
        let e = solve_position(&flat, &ranges, init).map_err(compute_err)?;
        (serde_json::to_value(&e).expect("estimates serialize"), vec![("estimate", e)])
    };
    let last = &estimates.last().expect("at least one estimate").1;
    checks.push("converged", last.converged, format!("{} iterations", last.iterations));
    checks.push(
        "objective_monotone",
        estimates.iter().all(|(_, e)| e.objective_trace.windows(2).all(|w| w[1] <= w[0])),
        "sum of squared residuals never increases between accepted steps",
    );
    let mut result = json!({ "estimate": result, "position": last.position });
    if let Some(t) = truth {
        result["error"] = json!(last.error_to(t));
    }
    let refs: Vec<(&str, &crate::localization::PositionEstimate)> = estimates.iter().map(|(l, e)| (*l, e)).collect();
    let artifacts =
        Artifacts { svg: Some(svg::towers_svg(&flat, Some(&ranges), &refs, truth)), ..Artifacts::default() };
    Ok((result, checks, artifacts))
}

fn run_accuracy(
    scene: &TowerScene,
    region: Region,
    step: f64,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<(Value, VerificationReport, Artifacts), CliError> {
    let map = accuracy_map(scene, region, step, sigma, trials, seed).map_err(|e| input_err("accuracy map", e))?;
    let mut checks = VerificationReport::new();
    let defined: Vec<f64> = map.cells.iter().filter_map(|c| c.analytic).collect();
    let degenerate = map.cells.len() - defined.len();
    checks.push(
        "analytic_finite_positive",
        defined.iter().all(|v| v.is_finite() && (*v > 0.0 || sigma == 0.0)),
        format!("{} cells, {degenerate} with degenerate geometry", map.cells.len()),
    );
    if trials > 0 {
        let failed: usize = map.cells.iter().map(|c| c.failed_trials).sum();
        checks.push(
            "rmse_finite",
            map.cells.iter().all(|c| c.rmse.is_some_and(f64::is_finite)),
            format!("{failed} of {} trials did not converge", trials * map.cells.len()),
        );
    }
    let result = serde_json::to_value(&map).expect("maps serialize");
    let artifacts = Artifacts {
        svg: Some(svg::heatmap_svg(&map, scene, trials > 0)),
        csv: Some(map.to_csv()),
        ..Artifacts::default()
    };
    Ok((result, checks, artifacts))
}

/// Executes a job and wraps the result in a timestamped report.
pub fn run_job(job: Job) -> Result<Outcome, CliError> {
    let (result, checks, artifacts) = execute(&job)?;
    let passed = checks.all_passed();
    let report = Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        timestamp: now(),
        job,
        result,
        checks: checks.checks,
        passed,
    };
    Ok(Outcome { report, artifacts })
}

/// Re-executes a report's echoed inputs and checks the outcome matches.
pub fn replay(original: &Report) -> Result<Outcome, CliError> {
    let again = run_job(original.job.clone())?;
    let same = again.report.comparable() == original.comparable();
    let mut checks = VerificationReport::new();
    checks.push("replay_identical", same, "all fields except the timestamp");
    checks.push(
        "original_passed",
        original.passed && original.checks.iter().all(|c| c.passed),
        format!("{} checks", original.checks.len()),
    );
    let passed = checks.all_passed();
    let report = Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        timestamp: now(),
        job: original.job.clone(),
        result: json!({ "replayed": original.job_name() }),
        checks: checks.checks,
        passed,
    };
    Ok(Outcome { report, artifacts: Artifacts::default() })
}

impl Report {
    fn job_name(&self) -> String {
        serde_json::to_value(&self.job)
            .ok()
            .and_then(|v| v.get("command").and_then(Value::as_str).map(str::to_owned))
            .unwrap_or_default()
    }
}

fn emit(
    outcome: &Outcome,
    output: Option<&Path>,
    extra: &[(Option<&PathBuf>, Option<&String>)],
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n";
    match output {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    for (path, content) in extra {
        if let (Some(p), Some(c)) = (path, content) {
            write_file(p, c)?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    let outcome = match &cli.command {
        Command::Verify(a) if a.triangulation.is_none() => {
            let original: Report = read_json(&a.input)?;
            let outcome = replay(&original)?;
            emit(&outcome, a.output.as_deref(), &[])?;
            return Ok(outcome.report.passed);
        }
        cmd => run_job(resolve(cmd)?)?,
    };
    let art = &outcome.artifacts;
    match &cli.command {
        Command::Triangulate(a) => emit(&outcome, a.out.output.as_deref(), &[(a.out.svg.as_ref(), art.svg.as_ref())])?,
        Command::CircleApprox(a) => emit(
            &outcome,
            a.out.output.as_deref(),
            &[(a.out.svg.as_ref(), art.svg.as_ref()), (a.csv.as_ref(), art.csv.as_ref())],
        )?,
        Command::Slice(a) => emit(
            &outcome,
            a.out.output.as_deref(),
            &[
                (a.out.svg.as_ref(), art.svg.as_ref()),
                (a.obj.as_ref(), art.obj.as_ref()),
                (a.mesh.as_ref(), art.mesh.as_ref()),
            ],
        )?,
        Command::Locate(a) => emit(&outcome, a.out.output.as_deref(), &[(a.out.svg.as_ref(), art.svg.as_ref())])?,
        Command::AccuracyMap(a) => emit(
            &outcome,
            a.out.output.as_deref(),
            &[(a.out.svg.as_ref(), art.svg.as_ref()), (a.csv.as_ref(), art.csv.as_ref())],
        )?,
        Command::Verify(a) => emit(&outcome, a.output.as_deref(), &[])?,
    }
    Ok(outcome.report.passed)
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: verification failed (see the report's checks)");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Reads a mesh JSON file and verifies it; used by tests and examples.
pub fn verify_mesh_file(path: &Path) -> Result<VerificationReport, CliError> {
    let mesh: SurfaceMesh = read_json(path)?;
    Ok(verify_mesh(&mesh))
}
