// Cut a cube into two prisms, mesh the surfaces, and compare decomposition
// strategies by how many triangles and faces they produce.

use std::error::Error;

use trikit::solid::{
    decomposition_cost, face_charts, slice_box, triangulate_solid_surface, verify_mesh, AxisBox, CutDiagonal, Strategy,
    SOLID_RTOL,
};
use trikit::svg::mesh_net_svg;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cube = AxisBox::unit_cube();
    let (p, q) = slice_box(&cube, CutDiagonal::Main);
    println!("prism volumes {} + {} = {}", p.volume(), q.volume(), cube.volume());
    println!("prism surface area {} (3 + sqrt 2 = {})", p.surface_area(), 3.0 + 2f64.sqrt());
    println!("congruent: {}", p.is_congruent_to(&q, SOLID_RTOL));

    let mesh = triangulate_solid_surface(&cube, Strategy::SingleSection)?;
    let checks = verify_mesh(&mesh);
    for c in &checks.checks {
        println!("  {:<24} {}", c.name, if c.passed { "pass" } else { "FAIL" });
    }
    if !checks.all_passed() {
        return Err("cube mesh failed verification".into());
    }

    for strategy in [Strategy::SingleSection, Strategy::MultiSection(2), Strategy::MultiSection(5)] {
        let cost = decomposition_cost(&cube, strategy)?;
        println!("{:>8}: {} triangles over {} faces", strategy.to_string(), cost.triangles, cost.faces);
    }

    let charts = vec![face_charts(&p)?, face_charts(&q)?];
    let path = std::env::temp_dir().join("trikit-cube-net.svg");
    std::fs::write(&path, mesh_net_svg(&charts, &mesh))?;
    println!("figure: {}", path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
