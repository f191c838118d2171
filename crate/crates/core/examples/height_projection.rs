// Towers on masts: flattening by dropping heights versus correcting the
// ranges for the height difference first.

use std::error::Error;

use trikit::localization::{project_to_2d, simulate_ranges_3d, solve_position, Projection, Tower3, TowerScene3};
use trikit::{Point2, Point3};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scene = TowerScene3::new(vec![
        Tower3::new("north", Point3::new(50.0, 100.0, 45.0)),
        Tower3::new("east", Point3::new(100.0, 40.0, 20.0)),
        Tower3::new("south", Point3::new(40.0, 0.0, 60.0)),
        Tower3::new("west", Point3::new(0.0, 60.0, 30.0)),
    ])?;
    let truth = Point2::new(40.0, 55.0);
    let ranges = simulate_ranges_3d(&scene, Point3::new(truth.x, truth.y, 0.0), 0.5, 7)?;

    for mode in [Projection::DropZ, Projection::HeightCorrected(0.0)] {
        let (flat, r) = project_to_2d(&scene, &ranges, mode)?;
        let est = solve_position(&flat, &r, None)?;
        println!("{:>17}: error {:.3} after {} iterations", mode.to_string(), est.error_to(truth), est.iterations);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
