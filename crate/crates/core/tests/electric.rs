use ablation_fem::bioheat::MaterialTable;
use ablation_fem::electric::{electrode_power, joule_heat, solve_potential};
use ablation_fem::mesh::{build_geometry, Mesh, ModelGeometry, Region};

fn setup() -> (Mesh, MaterialTable) {
    (build_geometry(&ModelGeometry::default(), 1e-4).unwrap(), MaterialTable::default())
}

#[test]
fn potential_obeys_the_maximum_principle() {
    let (mesh, mat) = setup();
    let sigma = mat.electrical_conductivity().unwrap();
    let v = solve_potential(&mesh, &sigma, 30.0).unwrap();
    let (lo, hi) = v.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(lo >= -1e-9 && hi <= 30.0 + 1e-9, "{lo} {hi}");
    assert_eq!(hi, 30.0);
}

#[test]
fn electrode_power_matches_volumetric_joule_heat() {
    let (mesh, mat) = setup();
    let sigma = mat.electrical_conductivity().unwrap();
    let v = solve_potential(&mesh, &sigma, 30.0).unwrap();
    let q = joule_heat(&mesh, &v, &sigma).unwrap();
    let p = electrode_power(&mesh, &v, &sigma).unwrap();
    assert!(((p - q.total_power) / q.total_power).abs() <= 0.02, "{p} vs {}", q.total_power);

    assert!(q.per_element.iter().all(|&x| x >= 0.0));
    let sum: f64 = (0..mesh.triangle_count()).map(|e| q.per_element[e] * mesh.revolved_volume(e)).sum();
    assert!(((sum - q.total_power) / sum).abs() < 1e-12);
    let by_region = q.region_power(&mesh);
    assert_eq!(by_region[Region::Electrode.index()], 0.0);
    assert!(((by_region.iter().sum::<f64>() - sum) / sum).abs() < 1e-12);
}

#[test]
fn power_scales_with_voltage_squared() {
    let (mesh, mat) = setup();
    let sigma = mat.electrical_conductivity().unwrap();
    let p = |v: f64| joule_heat(&mesh, &solve_potential(&mesh, &sigma, v).unwrap(), &sigma).unwrap().total_power;
    let (p20, p40) = (p(20.0), p(40.0));
    assert!((p40 / p20 - 4.0).abs() < 1e-9);
    assert_eq!(p(0.0), 0.0);
}

#[test]
fn more_conductive_blood_draws_more_power() {
    let (mesh, mut mat) = setup();
    let base = mat.electrical_conductivity().unwrap();
    let p0 = joule_heat(&mesh, &solve_potential(&mesh, &base, 30.0).unwrap(), &base).unwrap().total_power;
    mat.blood.electrical_conductivity = 1.0;
    let sigma = mat.electrical_conductivity().unwrap();
    let p1 = joule_heat(&mesh, &solve_potential(&mesh, &sigma, 30.0).unwrap(), &sigma).unwrap().total_power;
    assert!(p1 > p0, "{p1} <= {p0}");
}

#[test]
fn negative_voltage_is_rejected() {
    let (mesh, mat) = setup();
    assert!(solve_potential(&mesh, &mat.electrical_conductivity().unwrap(), -1.0).is_err());
}
