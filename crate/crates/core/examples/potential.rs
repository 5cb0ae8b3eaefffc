//! Electric potential of the default model and the resulting Joule heat.
//! `cargo run --example potential -- [voltage]`

use ablation_fem::bioheat::MaterialTable;
use ablation_fem::electric::{electrode_power, joule_heat, solve_potential};
use ablation_fem::mesh::{build_geometry, ModelGeometry, Node, Region};
use ablation_fem::postprocess::probe;

fn main() -> ablation_fem::Result<()> {
    let volts: f64 = std::env::args().nth(1).map(|a| a.parse().expect("voltage")).unwrap_or(30.0);
    let geometry = ModelGeometry::default();
    let mesh = build_geometry(&geometry, 1e-4)?;
    let sigma = MaterialTable::default().electrical_conductivity()?;
    let field = solve_potential(&mesh, &sigma, volts)?;
    let q = joule_heat(&mesh, &field, &sigma)?;
    let per_region = q.region_power(&mesh);
    println!("applied {volts} V");
    println!("Joule power {:.4} W (electrode current x voltage {:.4} W)", q.total_power, electrode_power(&mesh, &field, &sigma)?);
    for r in [Region::Muscle, Region::Blood] {
        println!("  {:<6} {:.4} W ({:.1} %)", r.name(), per_region[r.index()], 100.0 * per_region[r.index()] / q.total_power);
    }
    println!("potential along the axis below the tip:");
    for depth_mm in [0.0, 1.0, 2.0, 4.0, 8.0] {
        let z = geometry.depth_to_z(depth_mm * 1e-3);
        println!("  {depth_mm:>4} mm  {:.3} V", probe(&mesh, &field.values, Node::new(0.0, z))?);
    }
    Ok(())
}
