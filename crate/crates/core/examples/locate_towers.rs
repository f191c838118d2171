// Estimate a position from noisy ranges to four towers on a square.

use std::error::Error;

use trikit::localization::{dilution_of_precision, simulate_ranges, solve_position, TowerScene};
use trikit::svg::towers_svg;
use trikit::Point2;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scene = TowerScene::from_points(&[
        Point2::new(0.0, 0.0),
        Point2::new(10.0, 0.0),
        Point2::new(10.0, 10.0),
        Point2::new(0.0, 10.0),
    ])?;
    let truth = Point2::new(3.0, 7.0);
    let ranges = simulate_ranges(&scene, truth, 0.1, 42)?;
    let est = solve_position(&scene, &ranges, None)?;

    println!("truth     ({:.3}, {:.3})", truth.x, truth.y);
    println!("estimate  ({:.3}, {:.3})", est.position.x, est.position.y);
    println!("error {:.4}, rms residual {:.4}, {} iterations", est.error_to(truth), est.rms_residual, est.iterations);
    if let Some(hdop) = dilution_of_precision(&scene, truth) {
        println!("dilution of precision {hdop:.3}, predicted error {:.4}", hdop * ranges.sigma());
    }
    for (id, r) in &est.residuals {
        println!("  residual {id}: {r:+.4}");
    }

    let path = std::env::temp_dir().join("trikit-towers.svg");
    std::fs::write(&path, towers_svg(&scene, Some(&ranges), &[("estimate", &est)], Some(truth)))?;
    println!("figure: {}", path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
