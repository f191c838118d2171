// Predicted and simulated position error over a grid around three towers.

use std::error::Error;

use trikit::localization::{accuracy_map, Region, TowerScene};
use trikit::svg::heatmap_svg;
use trikit::Point2;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scene = TowerScene::from_points(&[Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(5.0, 8.0)])?;
    let region = Region { min: Point2::new(-10.0, -10.0), max: Point2::new(20.0, 20.0) };
    let map = accuracy_map(&scene, region, 2.5, 0.2, 200, 1)?;
    println!("{} x {} grid, sigma {}, {} trials per point", map.columns, map.rows, map.sigma, map.trials);

    let inside = map.cell_at(Point2::new(5.0, 2.5)).ok_or("no cell inside the triangle")?;
    let outside = map.cell_at(Point2::new(20.0, 20.0)).ok_or("no corner cell")?;
    for (label, c) in [("inside", inside), ("far corner", outside)] {
        let show = |v: Option<f64>| v.map_or("undefined".to_string(), |v| format!("{v:.4}"));
        println!("{label:>10}: analytic {}, simulated {}", show(c.analytic), show(c.rmse));
    }

    let dir = std::env::temp_dir();
    std::fs::write(dir.join("trikit-accuracy.csv"), map.to_csv())?;
    std::fs::write(dir.join("trikit-heatmap.svg"), heatmap_svg(&map, &scene, true))?;
    println!("table and figure in {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
