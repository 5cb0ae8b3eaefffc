use std::f64::consts::PI;

use proptest::prelude::*;

use ablation_fem::fem::{
    assemble_mass, assemble_robin, assemble_stiffness, element_load, solve_spd, CoefficientMap, CsrMatrix,
    DirichletSystem,
};
use ablation_fem::mesh::{build_geometry, rectangle, BoundaryTag, Grading, Mesh, ModelGeometry, RectangleSpec, Region};

fn block(cells_r: usize, cells_z: usize) -> Mesh {
    let spec = RectangleSpec::new((0.0, 2e-3), (0.0, 3e-3), cells_r, cells_z).sides([
        Some(BoundaryTag::Axis),
        Some(BoundaryTag::OuterGroundAndThermal),
        None,
        Some(BoundaryTag::ElectrodeSurface),
    ]);
    rectangle(&spec).unwrap()
}

fn annulus() -> Mesh {
    let spec = RectangleSpec::new((1e-3, 4e-3), (0.0, 2e-3), 6, 5)
        .grading_r(Grading::Geometric(1.3))
        .sides([Some(BoundaryTag::OuterGroundAndThermal), None, None, None]);
    rectangle(&spec).unwrap()
}

fn max_diff(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
    let n = a.dim();
    let mut m = 0.0f64;
    for (i, j, v) in a.triplets() {
        m = m.max((v - b.get(i, j)).abs());
    }
    for (i, j, v) in b.triplets() {
        m = m.max((v - a.get(i, j)).abs());
    }
    assert_eq!(n, b.dim());
    m
}

fn permuted(mesh: &Mesh, seed: u64) -> Mesh {
    let mut m = mesh.clone();
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    for i in (1..m.triangles.len()).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = (s >> 33) as usize % (i + 1);
        m.triangles.swap(i, j);
    }
    for t in &mut m.triangles {
        let k = (s >> 7) as usize % 3;
        t.nodes.rotate_left(k);
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
    }
    m
}

#[test]
fn stiffness_is_symmetric_with_constant_nullspace() {
    let mesh = build_geometry(&ModelGeometry::default(), 1e-4).unwrap();
    let coeff = CoefficientMap::new(0.0, 0.53, 0.52).unwrap();
    let k = assemble_stiffness(&mesh, &coeff).unwrap();
    assert!(k.asymmetry() <= 1e-14 * k.max_abs(), "{}", k.asymmetry());
    let worst = k.row_sums().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(worst <= 1e-12 * k.max_abs(), "{worst}");
    for i in 0..k.dim() {
        assert!(k.get(i, i) >= 0.0);
    }
}

#[test]
fn assembly_ignores_element_order_on_the_ablation_mesh() {
    let mesh = build_geometry(&ModelGeometry::default(), 1e-4).unwrap();
    let shuffled = permuted(&mesh, 7);
    let coeff = CoefficientMap::new(15.0, 0.53, 0.52).unwrap();
    let k = assemble_stiffness(&mesh, &coeff).unwrap();
    let ks = assemble_stiffness(&shuffled, &coeff).unwrap();
    assert!(max_diff(&k, &ks) <= 1e-13 * k.max_abs());
    let m = assemble_mass(&mesh, &coeff, false).unwrap();
    let ms = assemble_mass(&shuffled, &coeff, false).unwrap();
    assert!(max_diff(&m, &ms) <= 1e-13 * m.max_abs());
}

#[test]
fn mass_totals_are_revolved_volumes() {
    let mesh = build_geometry(&ModelGeometry::default(), 1e-4).unwrap();
    let one = CoefficientMap::uniform(1.0).unwrap();
    let v = mesh.total_volume();
    for lumped in [false, true] {
        let m = assemble_mass(&mesh, &one, lumped).unwrap();
        assert!(((m.total() - v) / v).abs() < 1e-10, "lumped {lumped}");
    }
    let consistent = assemble_mass(&mesh, &one, false).unwrap();
    let lumped = assemble_mass(&mesh, &one, true).unwrap();
    let rows = consistent.row_sums();
    for (i, d) in lumped.diagonal().iter().enumerate() {
        assert!((rows[i] - d).abs() <= 1e-12 * d.abs().max(1e-30));
    }
    let blood = assemble_mass(&mesh, &one.only(Region::Blood), false).unwrap();
    assert!(((blood.total() - mesh.region_volume(Region::Blood)) / blood.total()).abs() < 1e-12);
}

#[test]
fn robin_matrix_on_a_vertical_edge() {
    // r = r0 face of an annulus, length L: total ∫2πr ds = 2π r0 L
    let mesh = annulus();
    let (m, load) = assemble_robin(&mesh, BoundaryTag::OuterGroundAndThermal, 1.0, 1.0).unwrap();
    let expect = 2.0 * PI * 1e-3 * 2e-3;
    assert!((m.total() - expect).abs() < 1e-15);
    assert!((load.iter().sum::<f64>() - expect).abs() < 1e-15);

    let (m2, load2) = assemble_robin(&mesh, BoundaryTag::OuterGroundAndThermal, 2.0, 1.0).unwrap();
    assert!(max_diff(&m2, &m.scaled(2.0)) < 1e-15 * m2.max_abs());
    for (a, b) in load2.iter().zip(&load) {
        assert!((a - 2.0 * b).abs() <= 1e-15 * a.abs().max(1e-30));
    }
    assert!(assemble_robin(&mesh, BoundaryTag::MuscleBloodInterface, 1.0, 0.0).is_err());

    let (m0, load0) = assemble_robin(&mesh, BoundaryTag::OuterGroundAndThermal, 0.0, 80.0).unwrap();
    assert_eq!(m0.max_abs(), 0.0);
    assert!(load0.iter().all(|&v| v == 0.0));
}

#[test]
fn linear_profile_with_robin_end_is_reproduced() {
    // u = 1 + a z with u(0) = 1 and -k u'(L) = h (u(L) - T_ref), so T_ref = u(L) + k a / h
    let k = 0.7;
    let h = 50.0;
    let len = 3e-3;
    let mesh = block(4, 12);
    let kk = assemble_stiffness(&mesh, &CoefficientMap::uniform(k).unwrap()).unwrap();
    let slope = -100.0;
    let u_l = 1.0 + slope * len;
    let t_ref = u_l + k * slope / h;
    let (rm, rl) = assemble_robin(&mesh, BoundaryTag::ElectrodeSurface, h, t_ref).unwrap();
    let a = CsrMatrix::combine(&[(1.0, &kk), (1.0, &rm)]);
    let bottom: Vec<(usize, f64)> =
        (0..mesh.node_count()).filter(|&i| mesh.nodes[i].z == 0.0).map(|i| (i, 1.0)).collect();
    let sys = DirichletSystem::new(&a, &bottom).unwrap();
    let x = solve_spd(sys.matrix(), &sys.reduce_rhs(&rl), 1e-14).unwrap();
    let u = sys.expand(&x);
    for (i, p) in mesh.nodes.iter().enumerate() {
        let exact = 1.0 + slope * p.z;
        assert!((u[i] - exact).abs() < 1e-10, "node {i}: {} vs {exact}", u[i]);
    }
}

#[test]
fn linear_fields_have_zero_interior_residual() {
    let mesh = annulus();
    let k = assemble_stiffness(&mesh, &CoefficientMap::uniform(1.3).unwrap()).unwrap();
    // u = z is an exact harmonic field; the residual lives only on boundary rows
    let u: Vec<f64> = mesh.nodes.iter().map(|p| p.z).collect();
    let res = k.mul_vec(&u);
    let (zmin, zmax, rmin, rmax) = (0.0, 2e-3, 1e-3, 4e-3);
    for (i, p) in mesh.nodes.iter().enumerate() {
        let interior = p.z > zmin && p.z < zmax && p.r > rmin && p.r < rmax;
        if interior {
            assert!(res[i].abs() < 1e-15, "node {i} residual {}", res[i]);
        }
    }
}

#[test]
fn element_load_sums_to_source_power() {
    let mesh = annulus();
    let q: Vec<f64> = (0..mesh.triangle_count()).map(|e| 1.0 + e as f64).collect();
    let f = element_load(&mesh, &q);
    let power: f64 = (0..mesh.triangle_count()).map(|e| q[e] * mesh.revolved_volume(e)).sum();
    assert!((f.iter().sum::<f64>() - power).abs() < 1e-12 * power);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn order_independence(seed in any::<u64>(), cr in 1usize..6, cz in 1usize..6) {
        let mesh = block(cr, cz);
        let coeff = CoefficientMap::uniform(0.53).unwrap();
        let k = assemble_stiffness(&mesh, &coeff).unwrap();
        let ks = assemble_stiffness(&permuted(&mesh, seed), &coeff).unwrap();
        prop_assert!(max_diff(&k, &ks) <= 1e-13 * k.max_abs());
    }

    #[test]
    fn coefficient_scaling_is_linear(c in 1e-3f64..1e3) {
        let mesh = annulus();
        let one = assemble_stiffness(&mesh, &CoefficientMap::uniform(1.0).unwrap()).unwrap();
        let k = assemble_stiffness(&mesh, &CoefficientMap::uniform(c).unwrap()).unwrap();
        prop_assert!(max_diff(&k, &one.scaled(c)) <= 1e-13 * k.max_abs());
        let m1 = assemble_mass(&mesh, &CoefficientMap::uniform(1.0).unwrap(), false).unwrap();
        let m = assemble_mass(&mesh, &CoefficientMap::uniform(c).unwrap(), false).unwrap();
        prop_assert!(max_diff(&m, &m1.scaled(c)) <= 1e-13 * m.max_abs());
    }

    #[test]
    fn mass_is_positive_definite(v in proptest::collection::vec(-1.0f64..1.0, 1..64)) {
        let mesh = block(3, 4);
        let m = assemble_mass(&mesh, &CoefficientMap::uniform(1.0).unwrap(), false).unwrap();
        let x: Vec<f64> = (0..m.dim()).map(|i| v[i % v.len()] + 1e-3 * i as f64).collect();
        let mx = m.mul_vec(&x);
        let e: f64 = x.iter().zip(&mx).map(|(a, b)| a * b).sum();
        prop_assert!(e > 0.0);
    }

    #[test]
    fn reduced_system_stays_spd(v in proptest::collection::vec(-1.0f64..1.0, 1..64)) {
        let mesh = block(3, 4);
        let k = assemble_stiffness(&mesh, &CoefficientMap::uniform(2.0).unwrap()).unwrap();
        let fixed: Vec<(usize, f64)> = mesh.nodes_with_tag(BoundaryTag::OuterGroundAndThermal).into_iter().map(|i| (i, 0.0)).collect();
        let sys = DirichletSystem::new(&k, &fixed).unwrap();
        let a = sys.matrix();
        prop_assert!(a.asymmetry() <= 1e-14 * a.max_abs());
        let x: Vec<f64> = (0..a.dim()).map(|i| v[i % v.len()] + 1e-3).collect();
        let e: f64 = x.iter().zip(a.mul_vec(&x)).map(|(p, q)| p * q).sum();
        prop_assert!(e > 0.0);
    }
}
