//! Quasi-static potential `∇·(σ∇V) = 0` and the resistive heat source.
//!
//! The metal electrode is an equipotential: every node it touches carries
//! the applied voltage and its elements are left out of the conduction
//! operator. Hull nodes are grounded, the axis is a natural boundary.

use crate::error::{Error, Result};
use crate::fem::{assemble_stiffness, element_gradients, CoefficientMap, CsrMatrix, DirichletSystem, SpdSolver};
use crate::mesh::{BoundaryTag, Mesh, Region};

const POTENTIAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    /// Nodal potential, volts.
    pub values: Vec<f64>,
    pub applied_voltage: f64,
}

/// Element-wise volumetric heating `σ|∇V|²`, W/m³.
#[derive(Debug, Clone, PartialEq)]
pub struct JouleSource {
    pub per_element: Vec<f64>,
    /// `Σ Q·(revolved element volume)`, W.
    pub total_power: f64,
}

impl JouleSource {
    pub fn zero(mesh: &Mesh) -> Self {
        JouleSource { per_element: vec![0.0; mesh.triangle_count()], total_power: 0.0 }
    }

    /// Power deposited in each region, indexed by [`Region::index`].
    pub fn region_power(&self, mesh: &Mesh) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (e, t) in mesh.triangles.iter().enumerate() {
            p[t.region.index()] += self.per_element[e] * mesh.revolved_volume(e);
        }
        p
    }

    /// Source restricted to one region.
    pub fn restricted(&self, mesh: &Mesh, region: Region) -> Vec<f64> {
        mesh.triangles
            .iter()
            .zip(&self.per_element)
            .map(|(t, &q)| if t.region == region { q } else { 0.0 })
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        JouleSource {
            per_element: self.per_element.iter().map(|q| q * s).collect(),
            total_power: self.total_power * s,
        }
    }
}

fn conduction_operator(mesh: &Mesh, sigma: &CoefficientMap) -> Result<CsrMatrix> {
    let tissue = sigma.with(Region::Electrode, 0.0)?;
    for r in [Region::Muscle, Region::Blood] {
        if tissue.get(r) <= 0.0 && mesh.triangles.iter().any(|t| t.region == r) {
            return Err(Error::InvalidParameter(format!("σ must be positive in {}", r.name())));
        }
    }
    assemble_stiffness(mesh, &tissue)
}

/// Nodes held at the applied voltage: the tagged electrode surface plus
/// every node of an electrode element.
fn electrode_nodes(mesh: &Mesh) -> Vec<usize> {
    let mut nodes = mesh.nodes_with_tag(BoundaryTag::ElectrodeSurface);
    for t in mesh.triangles.iter().filter(|t| t.region == Region::Electrode) {
        nodes.extend(t.nodes);
    }
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

pub fn solve_potential(
    mesh: &Mesh,
    sigma: &CoefficientMap,
    applied_voltage: f64,
) -> Result<PotentialField> {
    if !(applied_voltage.is_finite() && applied_voltage >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "applied voltage must be >= 0, got {applied_voltage}"
        )));
    }
    let k = conduction_operator(mesh, sigma)?;
    let mut fixed: Vec<(usize, f64)> =
        electrode_nodes(mesh).into_iter().map(|i| (i, applied_voltage)).collect();
    fixed.extend(mesh.nodes_with_tag(BoundaryTag::OuterGroundAndThermal).into_iter().map(|i| (i, 0.0)));
    if fixed.is_empty() {
        return Err(Error::InvalidParameter("potential problem has no Dirichlet nodes".into()));
    }
    let sys = DirichletSystem::new(&k, &fixed)?;
    let rhs = sys.reduce_rhs(&vec![0.0; mesh.node_count()]);
    let solver = SpdSolver::direct(sys.matrix().clone(), POTENTIAL_TOL)?;
    let (x, _) = solver.solve(&rhs, None)?;
    Ok(PotentialField { values: sys.expand(&x), applied_voltage })
}

pub fn joule_heat(mesh: &Mesh, field: &PotentialField, sigma: &CoefficientMap) -> Result<JouleSource> {
    let mut per_element = vec![0.0; mesh.triangle_count()];
    let mut total_power = 0.0;
    for (e, t) in mesh.triangles.iter().enumerate() {
        if t.region == Region::Electrode {
            continue;
        }
        let (g, _) = element_gradients(mesh, e)?;
        let mut grad = [0.0; 2];
        for (k, &n) in t.nodes.iter().enumerate() {
            grad[0] += g[k][0] * field.values[n];
            grad[1] += g[k][1] * field.values[n];
        }
        let q = sigma.get(t.region) * (grad[0] * grad[0] + grad[1] * grad[1]);
        per_element[e] = q;
        total_power += q * mesh.revolved_volume(e);
    }
    Ok(JouleSource { per_element, total_power })
}

/// Power drawn through the electrode surface, `∫ σ ∂V/∂n V ds`, evaluated
/// as the discrete reaction current at the electrode nodes times their
/// potential.
pub fn electrode_power(mesh: &Mesh, field: &PotentialField, sigma: &CoefficientMap) -> Result<f64> {
    let k = conduction_operator(mesh, sigma)?;
    let kv = k.mul_vec(&field.values);
    Ok(electrode_nodes(mesh).into_iter().map(|i| field.values[i] * kv[i]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{rectangle, Grading, RectangleSpec};

    fn annulus(cells: usize) -> Mesh {
        let spec = RectangleSpec::new((1e-3, 20e-3), (0.0, 2e-3), cells, 2)
            .grading_r(Grading::Geometric(1.08))
            .region(Region::Blood)
            .sides([
                Some(BoundaryTag::ElectrodeSurface),
                Some(BoundaryTag::OuterGroundAndThermal),
                None,
                None,
            ]);
        rectangle(&spec).unwrap()
    }

    #[test]
    fn zero_voltage_gives_zero_field_and_source() {
        let mesh = annulus(20);
        let sigma = CoefficientMap::new(4e6, 0.222, 0.667).unwrap();
        let f = solve_potential(&mesh, &sigma, 0.0).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0));
        let q = joule_heat(&mesh, &f, &sigma).unwrap();
        assert_eq!(q.total_power, 0.0);
        assert!(q.per_element.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn source_is_quadratic_in_voltage() {
        let mesh = annulus(20);
        let sigma = CoefficientMap::new(4e6, 0.222, 0.667).unwrap();
        let q1 = joule_heat(&mesh, &solve_potential(&mesh, &sigma, 15.0).unwrap(), &sigma).unwrap();
        let q2 = joule_heat(&mesh, &solve_potential(&mesh, &sigma, 30.0).unwrap(), &sigma).unwrap();
        assert!((q2.total_power / q1.total_power - 4.0).abs() < 1e-9);
        for (a, b) in q1.per_element.iter().zip(&q2.per_element) {
            assert!((b - 4.0 * a).abs() <= 1e-9 * b.abs().max(1e-30));
        }
    }

    #[test]
    fn coaxial_annulus_matches_logarithmic_profile() {
        let mesh = annulus(40);
        let sigma = CoefficientMap::uniform(0.667).unwrap();
        let v0 = 30.0;
        let f = solve_potential(&mesh, &sigma, v0).unwrap();
        let exact = |r: f64| v0 * (0.020 / r).ln() / (0.020f64 / 0.001).ln();
        let (mut num, mut den) = (0.0, 0.0);
        for (i, p) in mesh.nodes.iter().enumerate() {
            num += (f.values[i] - exact(p.r)).powi(2) * p.r;
            den += exact(p.r).powi(2) * p.r;
        }
        assert!((num / den).sqrt() < 0.01, "relative L2 {}", (num / den).sqrt());

        let q = joule_heat(&mesh, &f, &sigma).unwrap();
        let h = 2e-3;
        let analytic = 2.0 * std::f64::consts::PI * 0.667 * v0 * v0 * h / 20f64.ln();
        assert!((q.total_power - analytic).abs() / analytic < 0.01, "{} vs {analytic}", q.total_power);
        let p_surface = electrode_power(&mesh, &f, &sigma).unwrap();
        assert!((p_surface - q.total_power).abs() / q.total_power < 1e-9);
    }
}
