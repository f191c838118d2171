// Wall-clock time of both triangulators on random star polygons of growing
// size. Run with `--release` for meaningful numbers.

use std::error::Error;
use std::time::Instant;

use trikit::shapes::random_star_polygon;
use trikit::triangulation::{triangulate, Method};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run_sizes(&[250, 500, 1000])
}

fn run_sizes(sizes: &[usize]) -> Result<(), Box<dyn Error>> {
    println!("{:>6} {:>12} {:>12}", "n", "earclip ms", "monotone ms");
    for &n in sizes {
        let poly = random_star_polygon(n, n as u64);
        let mut ms = [0.0; 2];
        for (slot, method) in ms.iter_mut().zip([Method::EarClip, Method::Monotone]) {
            let start = Instant::now();
            let t = triangulate(&poly, method)?;
            *slot = start.elapsed().as_secs_f64() * 1e3;
            assert_eq!(t.triangles().len(), n - 2);
        }
        println!("{n:>6} {:>12.2} {:>12.2}", ms[0], ms[1]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_sizes(&[1000, 2000, 4000, 8000])
}
