// How much of a circle inscribed regular polygons cover, and where the
// gain from one more vertex is largest.

use std::error::Error;

use trikit::circle::{coverage_ratio, marginal_gain_curve, min_vertices_for_ratio, Circle};
use trikit::svg::circle_svg;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let circle = Circle::unit();
    let curve = marginal_gain_curve(&circle, 12)?;
    println!("{:>3} {:>10} {:>10}", "n", "ratio", "gain");
    for e in &curve.entries {
        let gain = e.marginal_gain.map_or("-".to_string(), |g| format!("{g:.6}"));
        println!("{:>3} {:>10.6} {:>10}", e.n, e.ratio, gain);
    }
    println!("largest gain on the step to n = {:?}", curve.argmax_gain());
    assert!(curve.ratios_strictly_increasing() && curve.gains_strictly_decreasing());

    for target in [0.9, 0.99, 0.999] {
        let n = min_vertices_for_ratio(&circle, target)?;
        println!("ratio >= {target}: n = {n} (ratio {:.6})", coverage_ratio(&circle, n)?);
    }

    let path = std::env::temp_dir().join("trikit-circle.svg");
    std::fs::write(&path, circle_svg(&circle, &[3, 4, 6, 8])?)?;
    println!("figure: {}", path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
