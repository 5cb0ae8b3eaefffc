//! Builds the default axisymmetric mesh and prints its size, quality and
//! region volumes. `cargo run --example mesh_info -- [edge_length_m] [export_path]`

use ablation_fem::mesh::{build_geometry, io, mesh_quality, BoundaryTag, ModelGeometry, Region};

fn main() -> ablation_fem::Result<()> {
    let mut args = std::env::args().skip(1);
    let h: f64 = args.next().map(|a| a.parse().expect("edge length in metres")).unwrap_or(1e-4);
    let geometry = ModelGeometry::default();
    let mesh = build_geometry(&geometry, h)?;
    let q = mesh_quality(&mesh);
    println!("target edge {h:e} m: {} nodes, {} triangles", q.node_count, q.triangle_count);
    println!("min angle {:.2} deg, max aspect {:.3}", q.min_angle_deg, q.max_aspect_ratio);
    for r in Region::ALL {
        println!("  {:<9} {:>12.4} mm³", r.name(), q.volume(r) * 1e9);
    }
    for tag in BoundaryTag::ALL {
        println!("  {:<28} {} edges", tag.name(), mesh.edges_with_tag(tag).count());
    }
    if let Some(path) = args.next() {
        io::write_atomic(path.as_ref(), io::write_mesh(&mesh).as_bytes())?;
        println!("wrote {path}");
    }
    Ok(())
}
