// One tower reports a range that is 5 units too long. A second solve over
// the three best-fitting towers drops it.

use std::error::Error;

use trikit::localization::{simulate_ranges, two_round_locate, Tower, TowerScene};
use trikit::Point2;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let towers = [("A", 0.0, 0.0), ("B", 100.0, 0.0), ("C", 100.0, 100.0), ("D", 0.0, 100.0), ("E", 50.0, 130.0)];
    let scene = TowerScene::new(towers.iter().map(|&(id, x, y)| Tower::new(id, Point2::new(x, y))).collect())?;
    let truth = Point2::new(37.0, 58.0);
    let exact = simulate_ranges(&scene, truth, 0.0, 0)?;
    let ranges = exact.clone().with_range("C", exact.get("C").ok_or("no range for C")? + 5.0)?;

    let two = two_round_locate(&scene, &ranges)?;
    for (label, e) in [("round 1", &two.first), ("round 2", &two.second)] {
        println!(
            "{label}: ({:.4}, {:.4}) error {:.2e} using {}",
            e.position.x,
            e.position.y,
            e.error_to(truth),
            e.towers_used.join(",")
        );
    }
    if two.second.towers_used.iter().any(|id| id == "C") {
        return Err("corrupted tower survived round 2".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
