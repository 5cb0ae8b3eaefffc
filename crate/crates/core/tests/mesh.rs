use std::collections::BTreeMap;
use std::f64::consts::PI;

use ablation_fem::mesh::io::{read_mesh, write_mesh};
use ablation_fem::mesh::{build_geometry, mesh_quality, BoundaryTag, Mesh, ModelGeometry, Region};
use ablation_fem::Error;

const H: f64 = 1e-4;

fn default_mesh() -> Mesh {
    build_geometry(&ModelGeometry::default(), H).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn muscle_volume_matches_slab_minus_embedded_tip() {
    let g = ModelGeometry::default();
    let q = mesh_quality(&default_mesh());
    let slab = PI * g.tissue_radius.powi(2) * g.tissue_thickness;
    let expected = slab - g.embedded_electrode_volume();
    assert!(g.embedded_electrode_volume() < 0.01 * slab);
    assert!(rel(q.volume(Region::Muscle), expected) < 0.005, "{} vs {expected}", q.volume(Region::Muscle));
    assert!(rel(q.volume(Region::Muscle), 1.005e-5) < 0.005);
}

#[test]
fn regions_partition_the_model_cylinder() {
    let g = ModelGeometry::default();
    let mesh = default_mesh();
    let q = mesh_quality(&mesh);
    let cylinder = PI * g.tissue_radius.powi(2) * g.model_depth;
    assert!(rel(q.total_volume(), cylinder) < 1e-10);
    assert!(rel(q.total_volume(), mesh.total_volume()) < 1e-10);
    let tissue = q.volume(Region::Muscle) + q.volume(Region::Blood);
    assert!(rel(tissue, cylinder - g.electrode_volume()) < 0.005);
}

#[test]
fn node_count_is_near_the_reference_mesh() {
    let n = default_mesh().node_count() as f64;
    assert!((n - 2882.0).abs() <= 0.3 * 2882.0, "{n} nodes");
}

#[test]
fn smaller_edges_give_more_nodes() {
    let g = ModelGeometry::default();
    let coarse = build_geometry(&g, 2.0 * H).unwrap().node_count();
    let fine = build_geometry(&g, H).unwrap().node_count();
    let finer = build_geometry(&g, H / 2.0).unwrap().node_count();
    assert!(coarse < fine && fine < finer, "{coarse} {fine} {finer}");
}

#[test]
fn default_mesh_quality() {
    let q = mesh_quality(&default_mesh());
    assert!(q.min_angle_deg >= 20.0, "min angle {}", q.min_angle_deg);
    assert!(q.max_aspect_ratio.is_finite());
}

#[test]
fn every_region_and_tag_is_present() {
    let mesh = default_mesh();
    for r in Region::ALL {
        assert!(mesh.triangles.iter().any(|t| t.region == r), "{r:?}");
    }
    for tag in BoundaryTag::ALL {
        assert!(mesh.has_tag(tag), "{tag:?}");
    }
}

#[test]
fn conformity_and_axis() {
    let mesh = default_mesh();
    mesh.validate().unwrap();
    let mut owners: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, t) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t.nodes[k], t.nodes[(k + 1) % 3]);
            owners.entry((a.min(b), a.max(b))).or_default().push(e);
        }
    }
    let g = ModelGeometry::default();
    for (&(a, b), tri) in &owners {
        assert!(tri.len() <= 2);
        if tri.len() == 1 {
            // hull edges lie on the axis or the outer cylinder
            let (p, q) = (mesh.nodes[a], mesh.nodes[b]);
            let on = |f: &dyn Fn(f64, f64) -> bool| f(p.r, p.z) && f(q.r, q.z);
            assert!(
                on(&|r, _| r == 0.0)
                    || on(&|r, _| (r - g.tissue_radius).abs() < 1e-12)
                    || on(&|_, z| z.abs() < 1e-12)
                    || on(&|_, z| (z - g.model_depth).abs() < 1e-12),
                "hull edge ({a}, {b}) off the boundary"
            );
        }
    }
    for e in mesh.edges_with_tag(BoundaryTag::Axis) {
        assert!(e.nodes.iter().all(|&i| mesh.nodes[i].r == 0.0));
    }
    assert!(mesh.nodes.iter().all(|p| p.r >= 0.0));
    for (tag, pair) in [
        (BoundaryTag::ElectrodeBloodInterface, [Region::Electrode, Region::Blood]),
        (BoundaryTag::MuscleBloodInterface, [Region::Muscle, Region::Blood]),
    ] {
        for e in mesh.edges_with_tag(tag) {
            let (a, b) = (e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1]));
            let mut regions: Vec<Region> = owners[&(a, b)].iter().map(|&t| mesh.triangles[t].region).collect();
            regions.sort();
            let mut want = pair.to_vec();
            want.sort();
            assert_eq!(regions, want, "{tag:?}");
        }
    }
}

#[test]
fn build_is_deterministic_and_round_trips() {
    let a = write_mesh(&default_mesh());
    let b = write_mesh(&default_mesh());
    assert_eq!(a, b);
    let back = read_mesh(&a).unwrap();
    assert_eq!(write_mesh(&back), a);
}

#[test]
fn refinement_splits_and_keeps_straight_regions() {
    let g = ModelGeometry::default();
    let mesh = build_geometry(&g, 4.0 * H).unwrap();
    let fine = mesh.refine().unwrap();
    fine.validate().unwrap();
    assert_eq!(fine.triangle_count(), 4 * mesh.triangle_count());
    // blood is bounded by straight segments only
    assert!(rel(fine.region_volume(Region::Blood), mesh.region_volume(Region::Blood)) < 1e-12);
    assert!(rel(fine.total_volume(), mesh.total_volume()) < 1e-12);

    let cap_error = |m: &Mesh| (m.region_volume(Region::Electrode) - g.electrode_volume()).abs();
    let finer = fine.refine().unwrap();
    assert!(cap_error(&fine) < cap_error(&mesh), "{} {}", cap_error(&fine), cap_error(&mesh));
    assert!(cap_error(&finer) < cap_error(&fine));
}

#[test]
fn infeasible_geometry_names_the_constraint() {
    let cases = [
        (ModelGeometry { insertion_depth: 9e-3, ..Default::default() }, "insertion"),
        (ModelGeometry { electrode_radius: 25e-3, ..Default::default() }, "radius"),
        (ModelGeometry { blood_depth: 30e-3, ..Default::default() }, "depth"),
        (ModelGeometry { electrode_length: -1.0, ..Default::default() }, "electrode_length"),
    ];
    for (g, word) in cases {
        match build_geometry(&g, H) {
            Err(Error::Geometry(msg)) => assert!(msg.contains(word), "{msg} should mention {word}"),
            other => panic!("expected a geometry error mentioning {word}, got {other:?}"),
        }
    }
    assert!(build_geometry(&ModelGeometry::default(), 0.0).is_err());
}

#[test]
fn single_element_revolved_volume() {
    use ablation_fem::mesh::{Node, Triangle};
    // right triangle with legs 1 at r offset 1: ∫2πr dA = 2π·(4/3)·(1/2)
    let mesh = Mesh {
        nodes: vec![Node::new(1.0, 0.0), Node::new(2.0, 0.0), Node::new(1.0, 1.0)],
        triangles: vec![Triangle { nodes: [0, 1, 2], region: Region::Muscle }],
        boundary_edges: vec![],
        cap: None,
    };
    let q = mesh_quality(&mesh);
    assert!((q.volume(Region::Muscle) - 2.0 * PI * (4.0 / 3.0) * 0.5).abs() < 1e-14);
    assert!((q.min_angle_deg - 45.0).abs() < 1e-9);
}
