// Triangulate a comb-shaped polygon with both algorithms and check the results.

use std::error::Error;

use trikit::shapes::comb;
use trikit::svg::triangulation_svg;
use trikit::triangulation::{dual_graph, find_ears, triangulate, verify_triangulation, Method};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let poly = comb(4);
    println!("comb with {} vertices, area {}", poly.len(), poly.area());
    println!("ears: {:?}", find_ears(&poly).ear_indices);

    for method in [Method::EarClip, Method::Monotone] {
        let t = triangulate(&poly, method)?;
        let checks = verify_triangulation(&poly, &t);
        let dual = dual_graph(&t);
        println!(
            "{:>9}: {} triangles, {} diagonals, dual tree {}, max degree {}, checks {}",
            method.name(),
            t.triangles().len(),
            t.diagonals().len(),
            dual.is_tree(),
            dual.max_degree(),
            if checks.all_passed() { "pass" } else { "FAIL" },
        );
        if !checks.all_passed() {
            return Err(format!("{method:?} failed verification").into());
        }
        let path = std::env::temp_dir().join(format!("trikit-comb-{}.svg", method.name()));
        std::fs::write(&path, triangulation_svg(&poly, Some(&t)))?;
        println!("           figure: {}", path.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
