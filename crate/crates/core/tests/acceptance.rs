// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Runs without the libtest harness so the lines always show.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trikit::circle::{marginal_gain_curve, min_vertices_for_ratio, Circle};
use trikit::localization::{
    dilution_of_precision, monte_carlo_rmse, simulate_ranges, solve_position, two_round_locate, Tower, TowerScene,
};
use trikit::shapes::{random_star_polygon, rectangle, regular_polygon};
use trikit::solid::{
    decomposition_cost, slice_box, triangulate_solid_surface, verify_mesh, AxisBox, CutDiagonal, Strategy,
};
use trikit::triangulation::{dual_graph, find_ears, triangulate, Method, Triangulation};
use trikit::{Point2, SimplePolygon};

const CORPUS_SIZE: usize = 1000;
const CORPUS_SEED: u64 = 20_240_601;
const AREA_RTOL: f64 = 1e-9;
const CIRCLE_RTOL: f64 = 1e-12;
const CIRCLE_N_MAX: usize = 10_000;
const SOLID_RTOL: f64 = 1e-9;
const LOCATE_ATOL: f64 = 1e-7;
const DEGRADATION_SIGMA: f64 = 0.5;
const DEGRADATION_TRIALS: usize = 1000;
const DEGRADATION_SEED: u64 = 11;
const TWO_ROUND_TRIALS: usize = 200;
const TWO_ROUND_MIN_WINS: usize = 190;
const TWO_ROUND_SEED: u64 = 77;
const CORRUPTION: f64 = 5.0;
const GROWTH_SIZES: [usize; 3] = [1000, 2000, 4000];
const GROWTH_REPEATS: usize = 3;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Seeded random simple polygons with 3 to 200 vertices.
fn corpus() -> Vec<SimplePolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE).map(|_| random_star_polygon(rng.random_range(3..=200), rng.random())).collect()
}

fn triangulated(corpus: &[SimplePolygon]) -> Result<Vec<(usize, Method, Triangulation)>, String> {
    let mut out = Vec::new();
    for (k, poly) in corpus.iter().enumerate() {
        for method in [Method::EarClip, Method::Monotone] {
            let t = triangulate(poly, method).map_err(|e| format!("polygon {k} ({}): {e}", method.name()))?;
            out.push((k, method, t));
        }
    }
    Ok(out)
}

fn counting(corpus: &[SimplePolygon], ts: &[(usize, Method, Triangulation)], elapsed: Duration) -> Outcome {
    for (k, method, t) in ts {
        let n = corpus[*k].len();
        ensure(t.triangles().len() == n - 2 && t.diagonals().len() == n - 3, || {
            format!(
                "polygon {k} (n = {n}, {}): {} triangles, {} diagonals",
                method.name(),
                t.triangles().len(),
                t.diagonals().len()
            )
        })?;
    }
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} triangulations exact, {elapsed:.2?}", ts.len()))
}

fn area(corpus: &[SimplePolygon], ts: &[(usize, Method, Triangulation)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, method, t) in ts {
        let a = corpus[*k].area();
        let rel = (t.total_area() - a).abs() / a;
        worst = worst.max(rel);
        ensure(rel <= AREA_RTOL, || format!("polygon {k} ({}): relative error {rel:e}", method.name()))?;
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

fn two_ears(corpus: &[SimplePolygon]) -> Outcome {
    let mut fewest = usize::MAX;
    for (k, poly) in corpus.iter().enumerate().filter(|(_, p)| p.len() >= 4) {
        let ears = find_ears(poly).ear_indices.len();
        fewest = fewest.min(ears);
        ensure(ears >= 2, || format!("polygon {k} has {ears} ears"))?;
    }
    let mut convex: Vec<SimplePolygon> = (3..=64).map(regular_polygon).collect();
    convex.push(rectangle(3.0, 0.5));
    for poly in &convex {
        let ears = find_ears(poly).ear_indices.len();
        ensure(ears == poly.len(), || format!("convex {}-gon has {ears} ears", poly.len()))?;
    }
    Ok(format!("at least {fewest} ears per corpus polygon, {} convex fixtures all-ear", convex.len()))
}

fn dual(ts: &[(usize, Method, Triangulation)]) -> Outcome {
    for (k, method, t) in ts {
        let d = dual_graph(t);
        ensure(d.is_tree() && d.max_degree() <= 3, || {
            format!("polygon {k} ({}): tree {}, max degree {}", method.name(), d.is_tree(), d.max_degree())
        })?;
    }
    Ok(format!("{} duals are trees of degree at most 3", ts.len()))
}

fn circle() -> Outcome {
    let start = Instant::now();
    let c = Circle::unit();
    let curve = marginal_gain_curve(&c, CIRCLE_N_MAX).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for e in &curve.entries {
        let oracle = e.n as f64 / TAU * (TAU / e.n as f64).sin();
        let rel = (e.ratio - oracle).abs() / oracle;
        worst = worst.max(rel);
        ensure(rel <= CIRCLE_RTOL, || format!("n = {}: shoelace {} vs closed form {oracle}", e.n, e.ratio))?;
    }
    ensure(curve.entries.len() == CIRCLE_N_MAX - 2, || format!("{} entries", curve.entries.len()))?;
    ensure(curve.gains_strictly_decreasing(), || "gains not strictly decreasing".into())?;
    ensure(curve.argmax_gain() == Some(4), || format!("largest gain at {:?}", curve.argmax_gain()))?;
    let n99 = min_vertices_for_ratio(&c, 0.99).map_err(|e| e.to_string())?;
    let oracle99 = (3..).find(|&n: &usize| n as f64 / TAU * (TAU / n as f64).sin() >= 0.99).unwrap();
    ensure(n99 == 26 && oracle99 == 26, || format!("min vertices for 0.99: {n99}, oracle {oracle99}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("worst relative error {worst:.1e} up to n = {CIRCLE_N_MAX}, n(0.99) = 26, {elapsed:.2?}"))
}

fn solid() -> Outcome {
    let cube = AxisBox::unit_cube();
    let (p, q) = slice_box(&cube, CutDiagonal::Main);
    let (ep, eq) = (p.edge_lengths(), q.edge_lengths());
    ensure(ep.iter().zip(&eq).all(|(a, b)| (a - b).abs() <= SOLID_RTOL), || format!("edges {ep:?} vs {eq:?}"))?;
    let mesh = triangulate_solid_surface(&cube, Strategy::SingleSection).map_err(|e| e.to_string())?;
    ensure(mesh.triangles.len() == 16, || format!("{} triangles", mesh.triangles.len()))?;
    let expected = 6.0 + 2.0 * 2f64.sqrt();
    let rel = (mesh.total_area() - expected).abs() / expected;
    ensure(rel <= SOLID_RTOL, || format!("area {} vs {expected}", mesh.total_area()))?;
    let checks = verify_mesh(&mesh);
    ensure(checks.all_passed(), || format!("verify_mesh: {:?}", checks.failures().collect::<Vec<_>>()))?;
    let multi = triangulate_solid_surface(&cube, Strategy::MultiSection(3)).map_err(|e| e.to_string())?;
    ensure(multi.triangles.len() == 48, || format!("multi:3 gives {} triangles", multi.triangles.len()))?;
    ensure(verify_mesh(&multi).all_passed(), || "multi:3 mesh fails verification".into())?;
    let single_cost = decomposition_cost(&cube, Strategy::SingleSection).map_err(|e| e.to_string())?;
    let multi_cost = decomposition_cost(&cube, Strategy::MultiSection(3)).map_err(|e| e.to_string())?;
    ensure(multi_cost.triangles > single_cost.triangles && multi_cost.faces > single_cost.faces, || {
        format!("costs {single_cost:?} vs {multi_cost:?}")
    })?;
    Ok(format!(
        "16 triangles, area error {rel:.1e}, cost {}/{} faces vs {}/{} for multi:3",
        single_cost.triangles, single_cost.faces, multi_cost.triangles, multi_cost.faces
    ))
}

fn zero_noise() -> Outcome {
    let start = Instant::now();
    let scene = TowerScene::from_points(&[Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(0.0, 10.0)])
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..21 {
        for j in 0..21 {
            let truth = Point2::new(0.25 + 9.5 * i as f64 / 20.0, 0.25 + 9.5 * j as f64 / 20.0);
            let ranges = simulate_ranges(&scene, truth, 0.0, 0).map_err(|e| e.to_string())?;
            let est = solve_position(&scene, &ranges, None).map_err(|e| format!("{truth:?}: {e}"))?;
            let err = est.error_to(truth);
            worst = worst.max(err);
            ensure(err <= LOCATE_ATOL, || format!("{truth:?}: error {err:e}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("441 truths, worst error {worst:.1e}, {elapsed:.2?}"))
}

fn degradation() -> Outcome {
    let scene = TowerScene::from_points(&[
        Point2::new(0.0, 0.0),
        Point2::new(10.0, 0.0),
        Point2::new(10.0, 10.0),
        Point2::new(0.0, 10.0),
    ])
    .map_err(|e| e.to_string())?;
    let (near, far) = (Point2::new(5.0, 5.0), Point2::new(30.0, 30.0));
    let dop = |p| dilution_of_precision(&scene, p).ok_or_else(|| format!("{p:?}: singular geometry"));
    let (dn, df) = (dop(near)? * DEGRADATION_SIGMA, dop(far)? * DEGRADATION_SIGMA);
    let mc = |p, idx| -> Result<f64, String> {
        monte_carlo_rmse(&scene, p, DEGRADATION_SIGMA, DEGRADATION_TRIALS, DEGRADATION_SEED, idx)
            .map_err(|e| e.to_string())?
            .0
            .ok_or_else(|| format!("{p:?}: no converged trials"))
    };
    let (rn, rf) = (mc(near, 0)?, mc(far, 1)?);
    ensure(dn < df && rn < rf, || format!("analytic {dn} vs {df}, rmse {rn} vs {rf}"))?;
    Ok(format!("analytic {dn:.3} < {df:.3}, rmse {rn:.3} < {rf:.3}"))
}

fn two_round() -> Outcome {
    let towers = [("A", 0.0, 0.0), ("B", 100.0, 0.0), ("C", 100.0, 100.0), ("D", 0.0, 100.0), ("E", 50.0, 130.0)];
    let scene = TowerScene::new(towers.iter().map(|&(id, x, y)| Tower::new(id, Point2::new(x, y))).collect())
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(TWO_ROUND_SEED);
    let mut wins = 0;
    for _ in 0..TWO_ROUND_TRIALS {
        let truth = Point2::new(rng.random_range(10.0..90.0), rng.random_range(10.0..90.0));
        let bad = towers[rng.random_range(0..towers.len())].0;
        let exact = simulate_ranges(&scene, truth, 0.0, 0).map_err(|e| e.to_string())?;
        let ranges = exact.clone().with_range(bad, exact.get(bad).unwrap() + CORRUPTION).map_err(|e| e.to_string())?;
        let two = two_round_locate(&scene, &ranges).map_err(|e| e.to_string())?;
        let excluded = !two.second.towers_used.iter().any(|id| id == bad);
        if excluded && two.second.error_to(truth) < two.first.error_to(truth) {
            wins += 1;
        }
    }
    ensure(wins >= TWO_ROUND_MIN_WINS, || format!("{wins}/{TWO_ROUND_TRIALS} wins"))?;
    Ok(format!("{wins}/{TWO_ROUND_TRIALS} trials excluded the bad tower and improved"))
}

fn best_time(poly: &SimplePolygon, method: Method) -> Result<f64, String> {
    let mut best = f64::INFINITY;
    for _ in 0..GROWTH_REPEATS {
        let start = Instant::now();
        triangulate(poly, method).map_err(|e| e.to_string())?;
        best = best.min(start.elapsed().as_secs_f64());
    }
    Ok(best)
}

fn growth() -> Outcome {
    let polys: Vec<SimplePolygon> = GROWTH_SIZES.iter().map(|&n| random_star_polygon(n, n as u64)).collect();
    let mut ratios = [0.0; 2];
    for (slot, method) in ratios.iter_mut().zip([Method::EarClip, Method::Monotone]) {
        let t: Vec<f64> = polys.iter().map(|p| best_time(p, method)).collect::<Result<_, _>>()?;
        // geometric mean of the two doubling steps
        *slot = (t[2] / t[0]).sqrt();
    }
    ensure(ratios[0] > ratios[1], || format!("earclip doubling {:.2} vs monotone {:.2}", ratios[0], ratios[1]))?;
    Ok(format!("doubling ratio earclip {:.2} > monotone {:.2}", ratios[0], ratios[1]))
}

fn main() {
    let polys = corpus();
    let start = Instant::now();
    let ts = triangulated(&polys);
    let elapsed = start.elapsed();

    let results: Vec<(&str, Outcome)> = vec![
        ("counting lemma", ts.as_ref().map_err(Clone::clone).and_then(|ts| counting(&polys, ts, elapsed))),
        ("area conservation", ts.as_ref().map_err(Clone::clone).and_then(|ts| area(&polys, ts))),
        ("two ears", two_ears(&polys)),
        ("dual graph", ts.as_ref().map_err(Clone::clone).and_then(|ts| dual(ts))),
        ("circle curve", circle()),
        ("solid decomposition", solid()),
        ("zero-noise localization", zero_noise()),
        ("degradation with distance", degradation()),
        ("two-round robustness", two_round()),
        ("growth order", growth()),
    ];
    let mut failed = 0;
    for (k, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name:<26} PASS  {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name:<26} FAIL  {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
