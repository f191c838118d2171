//! Position estimation from noisy ranges to fixed towers.
//!
//! Ranges are simulated with additive Gaussian noise from a seeded ChaCha8
//! generator. The solver is a damped Gauss-Newton (Levenberg) iteration on
//! the sum of squared range residuals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{bbox_diagonal, orientation, Orientation, Point2, Point3, Tolerance};

pub const MAX_ITERATIONS: usize = 100;
/// Stop once a proposed step is shorter than this times the scene diagonal.
pub const STEP_RTOL: f64 = 1e-10;
const INITIAL_DAMPING: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalizationError {
    #[error("need at least {needed} towers, got {got}")]
    TooFewTowers { needed: usize, got: usize },
    #[error("tower id `{0}` appears more than once")]
    DuplicateTowerId(String),
    #[error("towers `{0}` and `{1}` are coincident")]
    CoincidentTowers(String, String),
    #[error("tower `{0}` has a non-finite coordinate")]
    NonFiniteTower(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("no range given for tower `{0}`")]
    MissingRange(String),
    #[error("range given for unknown tower `{0}`")]
    UnknownTower(String),
    #[error("range for tower `{id}` must be finite and non-negative, got {value}")]
    InvalidRange { id: String, value: f64 },
    #[error("sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("no convergence after {iterations} iterations (last step {step_norm:e})")]
    NonConvergence { iterations: usize, step_norm: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tower {
    pub id: String,
    pub pos: Point2,
}

impl Tower {
    pub fn new(id: impl Into<String>, pos: Point2) -> Self {
        Self { id: id.into(), pos }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tower3 {
    pub id: String,
    pub pos: Point3,
}

impl Tower3 {
    pub fn new(id: impl Into<String>, pos: Point3) -> Self {
        Self { id: id.into(), pos }
    }
}

fn check_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Result<(), LocalizationError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(LocalizationError::DuplicateTowerId(id.to_owned()));
        }
    }
    Ok(())
}

/// Planar towers: at least three, unique ids, distinct, not all collinear.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneRecord<Tower>", into = "SceneRecord<Tower>")]
pub struct TowerScene {
    towers: Vec<Tower>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneRecord<T> {
    towers: Vec<T>,
}

impl TryFrom<SceneRecord<Tower>> for TowerScene {
    type Error = LocalizationError;
    fn try_from(r: SceneRecord<Tower>) -> Result<Self, LocalizationError> {
        TowerScene::new(r.towers)
    }
}

impl From<TowerScene> for SceneRecord<Tower> {
    fn from(s: TowerScene) -> Self {
        SceneRecord { towers: s.towers }
    }
}

impl TowerScene {
    pub fn new(towers: Vec<Tower>) -> Result<Self, LocalizationError> {
        if towers.len() < 3 {
            return Err(LocalizationError::TooFewTowers { needed: 3, got: towers.len() });
        }
        if let Some(t) = towers.iter().find(|t| !t.pos.is_finite()) {
            return Err(LocalizationError::NonFiniteTower(t.id.clone()));
        }
        check_ids(towers.iter().map(|t| t.id.as_str()))?;
        for (i, a) in towers.iter().enumerate() {
            if let Some(b) = towers[i + 1..].iter().find(|b| b.pos == a.pos) {
                return Err(LocalizationError::CoincidentTowers(a.id.clone(), b.id.clone()));
            }
        }
        let pts: Vec<Point2> = towers.iter().map(|t| t.pos).collect();
        let tol = Tolerance::for_points(1e-9, &pts).expect("finite points");
        let collinear = pts[2..].iter().all(|&p| orientation(pts[0], pts[1], p, tol) == Orientation::Collinear);
        if collinear {
            return Err(LocalizationError::DegenerateGeometry("all towers are collinear".into()));
        }
        Ok(Self { towers })
    }

    /// Convenience constructor naming towers `T1`, `T2`, ...
    pub fn from_points(points: &[Point2]) -> Result<Self, LocalizationError> {
        Self::new(points.iter().enumerate().map(|(i, &p)| Tower::new(format!("T{}", i + 1), p)).collect())
    }

    pub fn towers(&self) -> &[Tower] {
        &self.towers
    }

    pub fn len(&self) -> usize {
        self.towers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.towers.is_empty()
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.towers.iter().map(|t| t.pos).collect()
    }

    pub fn centroid(&self) -> Point2 {
        let sum = self.towers.iter().fold(Point2::default(), |acc, t| acc + t.pos);
        sum * (1.0 / self.towers.len() as f64)
    }

    pub fn diagonal(&self) -> f64 {
        bbox_diagonal(&self.positions())
    }

    /// Sub-scene with the given ids, in the order given.
    pub fn subset(&self, ids: &[String]) -> Result<Self, LocalizationError> {
        let towers = ids
            .iter()
            .map(|id| {
                self.towers
                    .iter()
                    .find(|t| &t.id == id)
                    .cloned()
                    .ok_or_else(|| LocalizationError::UnknownTower(id.clone()))
            })
            .collect::<Result<_, _>>()?;
        Self::new(towers)
    }
}

/// Towers with heights, before projection to the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneRecord<Tower3>", into = "SceneRecord<Tower3>")]
pub struct TowerScene3 {
    towers: Vec<Tower3>,
}

impl TryFrom<SceneRecord<Tower3>> for TowerScene3 {
    type Error = LocalizationError;
    fn try_from(r: SceneRecord<Tower3>) -> Result<Self, LocalizationError> {
        TowerScene3::new(r.towers)
    }
}

impl From<TowerScene3> for SceneRecord<Tower3> {
    fn from(s: TowerScene3) -> Self {
        SceneRecord { towers: s.towers }
    }
}

impl TowerScene3 {
    /// Validated through its ground projection, which must be a valid planar scene.
    pub fn new(towers: Vec<Tower3>) -> Result<Self, LocalizationError> {
        if let Some(t) = towers.iter().find(|t| !t.pos.is_finite()) {
            return Err(LocalizationError::NonFiniteTower(t.id.clone()));
        }
        TowerScene::new(towers.iter().map(|t| Tower::new(t.id.clone(), t.pos.xy())).collect())?;
        Ok(Self { towers })
    }

    pub fn towers(&self) -> &[Tower3] {
        &self.towers
    }

    pub fn ground(&self) -> TowerScene {
        TowerScene { towers: self.towers.iter().map(|t| Tower::new(t.id.clone(), t.pos.xy())).collect() }
    }
}

/// Measured range per tower id, plus the noise parameters if simulated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RangeRecord", into = "RangeRecord")]
pub struct RangeSet {
    ranges: BTreeMap<String, f64>,
    sigma: f64,
    seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeRecord {
    #[serde(default)]
    sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    ranges: BTreeMap<String, f64>,
}

impl TryFrom<RangeRecord> for RangeSet {
    type Error = LocalizationError;
    fn try_from(r: RangeRecord) -> Result<Self, LocalizationError> {
        RangeSet::new(r.ranges, r.sigma, r.seed)
    }
}

impl From<RangeSet> for RangeRecord {
    fn from(r: RangeSet) -> Self {
        RangeRecord { sigma: r.sigma, seed: r.seed, ranges: r.ranges }
    }
}

impl RangeSet {
    pub fn new(ranges: BTreeMap<String, f64>, sigma: f64, seed: Option<u64>) -> Result<Self, LocalizationError> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(LocalizationError::InvalidSigma(sigma));
        }
        if let Some((id, &value)) = ranges.iter().find(|(_, r)| !(r.is_finite() && **r >= 0.0)) {
            return Err(LocalizationError::InvalidRange { id: id.clone(), value });
        }
        Ok(Self { ranges, sigma, seed })
    }

    pub fn measured(ranges: impl IntoIterator<Item = (String, f64)>) -> Result<Self, LocalizationError> {
        Self::new(ranges.into_iter().collect(), 0.0, None)
    }

    pub fn ranges(&self) -> &BTreeMap<String, f64> {
        &self.ranges
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.ranges.get(id).copied()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Replaces one range, keeping the noise parameters.
    pub fn with_range(mut self, id: &str, value: f64) -> Result<Self, LocalizationError> {
        if !self.ranges.contains_key(id) {
            return Err(LocalizationError::UnknownTower(id.to_owned()));
        }
        self.ranges.insert(id.to_owned(), value);
        Self::new(self.ranges, self.sigma, self.seed)
    }

    /// Exactly one range per scene tower and nothing else.
    pub fn check_matches<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<(), LocalizationError> {
        let wanted: BTreeSet<&str> = ids.into_iter().collect();
        if let Some(id) = wanted.iter().find(|id| !self.ranges.contains_key(**id)) {
            return Err(LocalizationError::MissingRange((*id).to_owned()));
        }
        if let Some(id) = self.ranges.keys().find(|id| !wanted.contains(id.as_str())) {
            return Err(LocalizationError::UnknownTower(id.clone()));
        }
        Ok(())
    }

    fn for_scene(&self, scene: &TowerScene) -> Result<Vec<f64>, LocalizationError> {
        scene
            .towers
            .iter()
            .map(|t| self.get(&t.id).ok_or_else(|| LocalizationError::MissingRange(t.id.clone())))
            .collect()
    }
}

fn noisy(distances: impl Iterator<Item = (String, f64)>, sigma: f64, seed: u64) -> Result<RangeSet, LocalizationError> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(LocalizationError::InvalidSigma(sigma));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).map_err(|_| LocalizationError::InvalidSigma(sigma))?;
    let ranges = distances
        .map(|(id, d)| {
            let g = if sigma > 0.0 { normal.sample(&mut rng) } else { 0.0 };
            (id, (d + g).max(0.0))
        })
        .collect();
    RangeSet::new(ranges, sigma, Some(seed))
}

/// `max(0, |truth - tower| + g)` with `g ~ N(0, sigma²)` drawn in scene order.
pub fn simulate_ranges(
    scene: &TowerScene,
    truth: Point2,
    sigma: f64,
    seed: u64,
) -> Result<RangeSet, LocalizationError> {
    noisy(scene.towers.iter().map(|t| (t.id.clone(), truth.distance(t.pos))), sigma, seed)
}

/// Same noise model on full 3D distances.
pub fn simulate_ranges_3d(
    scene: &TowerScene3,
    truth: Point3,
    sigma: f64,
    seed: u64,
) -> Result<RangeSet, LocalizationError> {
    noisy(scene.towers.iter().map(|t| (t.id.clone(), truth.distance(t.pos))), sigma, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionEstimate {
    pub position: Point2,
    /// Measured minus predicted range, per tower used.
    pub residuals: BTreeMap<String, f64>,
    pub rms_residual: f64,
    /// Proposed steps, accepted or rejected.
    pub iterations: usize,
    pub converged: bool,
    pub towers_used: Vec<String>,
    /// Sum of squared residuals at the start and after each accepted step,
    /// updated incrementally from the exact per-step change.
    pub objective_trace: Vec<f64>,
}

impl PositionEstimate {
    pub fn error_to(&self, truth: Point2) -> f64 {
        self.position.distance(truth)
    }
}

fn residuals(towers: &[Point2], ranges: &[f64], p: Point2) -> Vec<f64> {
    towers.iter().zip(ranges).map(|(&t, &r)| r - p.distance(t)).collect()
}

fn objective(towers: &[Point2], ranges: &[f64], p: Point2) -> f64 {
    residuals(towers, ranges, p).iter().map(|r| r * r).sum()
}

/// `objective(p + step) - objective(p)` without cancellation: each range
/// change is formed from the step itself, so tiny steps near the minimum are
/// still ranked correctly.
fn objective_change(towers: &[Point2], ranges: &[f64], p: Point2, step: Point2) -> f64 {
    towers
        .iter()
        .zip(ranges)
        .map(|(&t, &m)| {
            let (d_old, d_new) = (p.distance(t), (p + step).distance(t));
            let denom = d_old + d_new;
            let dd = if denom > 0.0 { (2.0 * (p - t).dot(step) + step.dot(step)) / denom } else { 0.0 };
            // (m - d_new)² - (m - d_old)²
            -dd * (2.0 * (m - d_old) - dd)
        })
        .sum()
}

/// Unit bearing from each tower to `p`; zero when `p` sits on a tower.
fn bearings(towers: &[Point2], p: Point2) -> Vec<Point2> {
    towers
        .iter()
        .map(|&t| {
            let d = p - t;
            let n = d.norm();
            if n > 0.0 {
                d * (1.0 / n)
            } else {
                Point2::default()
            }
        })
        .collect()
}

/// Symmetric 2x2 normal matrix `[a b; b c]` of the bearing rows.
fn normal_matrix(rows: &[Point2]) -> (f64, f64, f64) {
    rows.iter().fold((0.0, 0.0, 0.0), |(a, b, c), g| (a + g.x * g.x, b + g.x * g.y, c + g.y * g.y))
}

/// Gauss-Newton matrix `JᵀJ` plus the residual curvature term when the sum
/// stays positive definite. Large residuals (inconsistent ranges) make plain
/// Gauss-Newton converge only linearly; the full Hessian restores fast local
/// convergence near the minimum.
fn curvature(towers: &[Point2], rows: &[Point2], r: &[f64], p: Point2) -> (f64, f64, f64) {
    let (a, b, c) = normal_matrix(rows);
    let (mut fa, mut fb, mut fc) = (a, b, c);
    for ((&t, g), &ri) in towers.iter().zip(rows).zip(r) {
        let d = p.distance(t);
        if d == 0.0 {
            return (a, b, c);
        }
        let w = ri / d;
        fa -= w * (1.0 - g.x * g.x);
        fb -= w * -(g.x * g.y);
        fc -= w * (1.0 - g.y * g.y);
    }
    if fa > 0.0 && fa * fc - fb * fb > 1e-12 * (fa + fc) * (fa + fc) {
        (fa, fb, fc)
    } else {
        (a, b, c)
    }
}

/// Solves `([a b; b c] + mu I) x = g`; `None` when not positive definite.
fn solve2(a: f64, b: f64, c: f64, mu: f64, g: Point2) -> Option<Point2> {
    let (a, c) = (a + mu, c + mu);
    let det = a * c - b * b;
    (a > 0.0 && det > 0.0).then(|| Point2::new((c * g.x - b * g.y) / det, (a * g.y - b * g.x) / det))
}

/// Minimizes `sum (range_i - |p - tower_i|)²` from `init` (tower centroid by default).
pub fn solve_position(
    scene: &TowerScene,
    ranges: &RangeSet,
    init: Option<Point2>,
) -> Result<PositionEstimate, LocalizationError> {
    let towers = scene.positions();
    let measured = ranges.for_scene(scene)?;
    let tol = STEP_RTOL * scene.diagonal();
    let mut p = init.unwrap_or_else(|| scene.centroid());
    let mut f = objective(&towers, &measured, p);
    let mut trace = vec![f];
    let mut lambda = INITIAL_DAMPING;
    let mut step_norm = f64::INFINITY;

    for iteration in 1..=MAX_ITERATIONS {
        let rows = bearings(&towers, p);
        let r = residuals(&towers, &measured, p);
        let (a, b, c) = curvature(&towers, &rows, &r, p);
        // gradient of the predicted ranges is the bearing, so r(p + d) ≈ r - J d
        let g = rows.iter().zip(&r).fold(Point2::default(), |acc, (&j, &ri)| acc + j * ri);
        if let Some(newton) = solve2(a, b, c, 0.0, g).filter(|s| s.norm() < tol) {
            // sub-tolerance correction: too small for the objective to rank
            // reliably, so it is applied without the acceptance test
            p = p + newton;
            return Ok(estimate(scene, &towers, &measured, p, iteration, trace));
        }
        let mu = lambda * ((a + c) * 0.5).max(f64::MIN_POSITIVE);
        let step = solve2(a, b, c, mu, g).unwrap_or_default();
        step_norm = step.norm();
        if step_norm < tol {
            return Ok(estimate(scene, &towers, &measured, p, iteration, trace));
        }
        let change = objective_change(&towers, &measured, p, step);
        if change <= 0.0 {
            p = p + step;
            f += change;
            trace.push(f);
            lambda = (lambda / 10.0).max(1e-12);
        } else {
            lambda *= 10.0;
        }
    }
    Err(LocalizationError::NonConvergence { iterations: MAX_ITERATIONS, step_norm })
}

fn estimate(
    scene: &TowerScene,
    towers: &[Point2],
    measured: &[f64],
    p: Point2,
    iterations: usize,
    objective_trace: Vec<f64>,
) -> PositionEstimate {
    let r = residuals(towers, measured, p);
    let rms = (r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64).sqrt();
    PositionEstimate {
        position: p,
        residuals: scene.towers.iter().map(|t| t.id.clone()).zip(r).collect(),
        rms_residual: rms,
        iterations,
        converged: true,
        towers_used: scene.towers.iter().map(|t| t.id.clone()).collect(),
        objective_trace,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoRoundEstimate {
    /// All towers, from the centroid.
    pub first: PositionEstimate,
    /// The three best-fitting towers, from the first estimate.
    pub second: PositionEstimate,
}

impl TwoRoundEstimate {
    pub fn position(&self) -> Point2 {
        self.second.position
    }
}

/// Round 1 over all towers, then round 2 over the three towers with the
/// smallest absolute round-1 residual (ties by id).
pub fn two_round_locate(scene: &TowerScene, ranges: &RangeSet) -> Result<TwoRoundEstimate, LocalizationError> {
    if scene.len() < 4 {
        return Err(LocalizationError::TooFewTowers { needed: 4, got: scene.len() });
    }
    let first = solve_position(scene, ranges, None)?;
    let mut ranked: Vec<(&String, f64)> = first.residuals.iter().map(|(id, r)| (id, r.abs())).collect();
    ranked.sort_by(|x, y| x.1.total_cmp(&y.1).then_with(|| x.0.cmp(y.0)));
    let chosen: Vec<String> = ranked.iter().take(3).map(|(id, _)| (*id).clone()).collect();
    let sub = scene.subset(&chosen)?;
    let second = solve_position(&sub, ranges, Some(first.position))?;
    Ok(TwoRoundEstimate { first, second })
}

/// How heights are removed before solving in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Projection {
    /// Keep (x, y) and use ranges as measured.
    DropZ,
    /// Remove the vertical offset to an assumed user height.
    HeightCorrected(f64),
}

impl FromStr for Projection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "dropz" {
            return Ok(Self::DropZ);
        }
        s.strip_prefix("heightcorrected:")
            .and_then(|z| z.parse::<f64>().ok())
            .filter(|z| z.is_finite())
            .map(Self::HeightCorrected)
            .ok_or_else(|| format!("mode must be `dropz` or `heightcorrected:Z`, got `{s}`"))
    }
}

impl TryFrom<String> for Projection {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Projection> for String {
    fn from(p: Projection) -> Self {
        p.to_string()
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DropZ => f.write_str("dropz"),
            Self::HeightCorrected(z) => write!(f, "heightcorrected:{z}"),
        }
    }
}

/// Ground scene plus ranges adjusted per `mode`; a range shorter than the
/// height offset clamps to zero.
pub fn project_to_2d(
    scene: &TowerScene3,
    ranges: &RangeSet,
    mode: Projection,
) -> Result<(TowerScene, RangeSet), LocalizationError> {
    let ground = scene.ground();
    let projected = match mode {
        Projection::DropZ => ranges.clone(),
        Projection::HeightCorrected(z) => {
            let mut out = BTreeMap::new();
            for t in &scene.towers {
                let r = ranges.get(&t.id).ok_or_else(|| LocalizationError::MissingRange(t.id.clone()))?;
                let dz = t.pos.z - z;
                out.insert(t.id.clone(), (r * r - dz * dz).max(0.0).sqrt());
            }
            RangeSet::new(out, ranges.sigma, ranges.seed)?
        }
    };
    Ok((ground, projected))
}

/// Horizontal dilution of precision at `p`, `sqrt(trace((JᵀJ)⁻¹))` over unit
/// bearings. `None` when the bearings do not span the plane.
pub fn dilution_of_precision(scene: &TowerScene, p: Point2) -> Option<f64> {
    let towers = scene.positions();
    if towers.iter().any(|&t| t.distance(p) <= 1e-12 * scene.diagonal()) {
        return None;
    }
    let (a, b, c) = normal_matrix(&bearings(&towers, p));
    let det = a * c - b * b;
    if det <= 1e-12 * (a + c) * (a + c) {
        return None;
    }
    Some(((a + c) / det).sqrt())
}

/// Axis-aligned sampling region, inclusive of both corners.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub min: Point2,
    pub max: Point2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCell {
    pub position: Point2,
    /// `sigma * HDOP`; `None` where the geometry is degenerate.
    pub analytic: Option<f64>,
    /// Monte Carlo RMSE over the trials that converged; `None` with no trials.
    pub rmse: Option<f64>,
    pub failed_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyMap {
    pub region: Region,
    pub step: f64,
    pub columns: usize,
    pub rows: usize,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    /// Row-major from `region.min`, x varying fastest.
    pub cells: Vec<AccuracyCell>,
}

impl AccuracyMap {
    pub fn cell_at(&self, p: Point2) -> Option<&AccuracyCell> {
        self.cells.iter().find(|c| c.position.distance(p) <= 1e-9 * self.step)
    }

    /// `x,y,analytic,rmse`; missing values are empty cells.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        let mut out = String::from("x,y,analytic,rmse\n");
        for c in &self.cells {
            out.push_str(&format!("{},{},{},{}\n", c.position.x, c.position.y, opt(c.analytic), opt(c.rmse)));
        }
        out
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_4765_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one Monte Carlo trial, independent of evaluation order.
pub fn trial_seed(master: u64, grid_index: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ grid_index) ^ trial)
}

/// Monte Carlo RMSE of [`solve_position`] at `truth`; also returns how many
/// trials failed to converge (excluded from the mean).
pub fn monte_carlo_rmse(
    scene: &TowerScene,
    truth: Point2,
    sigma: f64,
    trials: usize,
    seed: u64,
    grid_index: u64,
) -> Result<(Option<f64>, usize), LocalizationError> {
    let mut sum = 0.0;
    let mut ok = 0usize;
    for k in 0..trials {
        let ranges = simulate_ranges(scene, truth, sigma, trial_seed(seed, grid_index, k as u64))?;
        if let Ok(est) = solve_position(scene, &ranges, None) {
            sum += est.error_to(truth).powi(2);
            ok += 1;
        }
    }
    let rmse = (ok > 0).then(|| (sum / ok as f64).sqrt());
    Ok((rmse, trials - ok))
}

/// Analytic and (if `trials > 0`) Monte Carlo error at each grid point.
/// Grid points are evaluated in parallel; results do not depend on thread count.
pub fn accuracy_map(
    scene: &TowerScene,
    region: Region,
    step: f64,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<AccuracyMap, LocalizationError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(LocalizationError::InvalidGrid(format!("step must be positive, got {step}")));
    }
    let span = region.max - region.min;
    if !(span.x >= 0.0 && span.y >= 0.0 && span.is_finite()) {
        return Err(LocalizationError::InvalidGrid("region max must dominate min".into()));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(LocalizationError::InvalidSigma(sigma));
    }
    let count = |len: f64| (len / step + 1e-9).floor() as usize + 1;
    let (columns, rows) = (count(span.x), count(span.y));
    if columns.saturating_mul(rows) > 1_000_000 {
        return Err(LocalizationError::InvalidGrid(format!("{columns}x{rows} grid is too large")));
    }
    let cells = (0..columns * rows)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % columns, idx / columns);
            let position = Point2::new(region.min.x + step * i as f64, region.min.y + step * j as f64);
            let analytic = dilution_of_precision(scene, position).map(|h| h * sigma);
            let (rmse, failed_trials) = monte_carlo_rmse(scene, position, sigma, trials, seed, idx as u64)?;
            Ok(AccuracyCell { position, analytic, rmse, failed_trials })
        })
        .collect::<Result<Vec<_>, LocalizationError>>()?;
    Ok(AccuracyMap { region, step, columns, rows, sigma, trials, seed, cells })
}
