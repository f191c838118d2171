use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use trikit::cli::Report;

macro_rules! fixture {
    ($name:literal) => {
        concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $name)
    };
}

fn trikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trikit")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unit_square_gives_two_triangles() {
    let sq = fixture!("unit_square.json");
    for algo in ["earclip", "monotone"] {
        let out = trikit(&["triangulate", "--input", sq, "--algo", algo]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert_eq!(r["result"]["triangle_count"], 2);
        assert_eq!(r["result"]["diagonal_count"], 1);
        assert!((r["result"]["triangulation_area"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r["passed"], true);
        assert_eq!(r["inputs"]["vertices"][2], serde_json::json!([1.0, 1.0]));
    }
}

#[test]
fn circle_table_peaks_at_four() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("c.csv");
    let out = trikit(&["circle-approx", "--n-max", "16", "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["argmax_gain_n"], 4);
    let ratios: Vec<f64> =
        r["result"]["entries"].as_array().unwrap().iter().map(|e| e["ratio"].as_f64().unwrap()).collect();
    assert_eq!(ratios.len(), 14);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
    let table = std::fs::read_to_string(csv).unwrap();
    assert_eq!(table.lines().count(), 15);
}

#[test]
fn two_round_excludes_the_corrupted_tower() {
    let out = trikit(&[
        "locate",
        "--input",
        fixture!("towers_five.json"),
        "--ranges",
        fixture!("ranges_five_corrupted.json"),
        "--two-round",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let used: Vec<&str> = r["result"]["estimate"]["second"]["towers_used"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(used.len(), 3);
    assert!(!used.contains(&"C"));
    let pos = &r["result"]["position"];
    assert!((pos[0].as_f64().unwrap() - 37.0).abs() < 1e-7);
    assert!((pos[1].as_f64().unwrap() - 58.0).abs() < 1e-7);
}

#[test]
fn malformed_input_exits_with_two_and_names_the_problem() {
    let dir = TempDir::new().unwrap();
    let bowtie = dir.path().join("bowtie.json");
    std::fs::write(&bowtie, r#"{"vertices": [[0,0],[1,1],[1,0],[0,1]]}"#).unwrap();
    let out = trikit(&["triangulate", "--input", path_str(&bowtie)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("intersects"));

    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"vertices": [[0,0],[1,0]]}"#).unwrap();
    assert_eq!(trikit(&["triangulate", "--input", path_str(&short)]).status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    assert_eq!(trikit(&["triangulate", "--input", path_str(&missing)]).status.code(), Some(2));

    let out = trikit(&["slice", "--input", fixture!("unit_cube.json"), "--strategy", "multi:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(trikit(&["triangulate"]).status.code(), Some(2));
}

#[test]
fn reports_reproduce_and_verify_replays_them() {
    let dir = TempDir::new().unwrap();
    let runs: [&[&str]; 5] = [
        &["triangulate", "--input", fixture!("comb.json"), "--algo", "monotone"],
        &["circle-approx", "--n-max", "32", "--target", "0.99"],
        &["slice", "--input", fixture!("two_boxes.json"), "--strategy", "multi:3"],
        &["locate", "--input", fixture!("towers_square.json"), "--truth", "3,4", "--sigma", "0.2", "--seed", "5"],
        &["accuracy-map", "--input", fixture!("towers_square.json"), "--step", "5", "--trials", "20", "--seed", "2"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = trikit(args);
        let b = trikit(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        let ra: Report = serde_json::from_slice(&a.stdout).unwrap();
        let rb: Report = serde_json::from_slice(&b.stdout).unwrap();
        assert_eq!(ra.comparable(), rb.comparable(), "{args:?}");

        let saved = dir.path().join(format!("r{i}.json"));
        std::fs::write(&saved, &a.stdout).unwrap();
        let v = trikit(&["verify", "--input", path_str(&saved)]);
        assert_eq!(v.status.code(), Some(0), "{args:?}");
        assert_eq!(report(&v)["passed"], true);
    }
}

#[test]
fn verify_flags_a_tampered_report() {
    let dir = TempDir::new().unwrap();
    let out = trikit(&["triangulate", "--input", fixture!("l_shape.json")]);
    let mut r = report(&out);
    r["result"]["triangle_count"] = 99.into();
    let saved = dir.path().join("r.json");
    std::fs::write(&saved, serde_json::to_string(&r).unwrap()).unwrap();
    let v = trikit(&["verify", "--input", path_str(&saved)]);
    assert_eq!(v.status.code(), Some(1));
    assert_eq!(report(&v)["checks"][0]["passed"], false);
}

#[test]
fn verify_checks_a_triangulation_record() {
    let dir = TempDir::new().unwrap();
    let sq = fixture!("unit_square.json");
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"method": "earclip", "triangles": [[0,1,2],[0,2,3]], "diagonals": [[0,2]]}"#).unwrap();
    assert_eq!(trikit(&["verify", "--input", sq, "--triangulation", path_str(&good)]).status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"method": "earclip", "triangles": [[0,1,2]], "diagonals": []}"#).unwrap();
    let out = trikit(&["verify", "--input", sq, "--triangulation", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn side_outputs_are_written() {
    let dir = TempDir::new().unwrap();
    let p = |f: &str| dir.path().join(f);
    let (svg, obj, mesh, out) = (p("net.svg"), p("m.obj"), p("m.json"), p("r.json"));
    let status = trikit(&[
        "slice",
        "--input",
        fixture!("unit_cube.json"),
        "--svg",
        path_str(&svg),
        "--obj",
        path_str(&obj),
        "--mesh",
        path_str(&mesh),
        "--output",
        path_str(&out),
    ])
    .status;
    assert_eq!(status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let faces = std::fs::read_to_string(&obj).unwrap().lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(faces, 16);
    assert!(trikit::cli::verify_mesh_file(&mesh).unwrap().all_passed());
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.passed);
}
