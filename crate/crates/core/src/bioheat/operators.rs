use super::{BoundaryConditions, FilmEdge, InterfaceModel, MaterialTable, ThermalMesh};
use crate::electric::JouleSource;
use crate::error::{Error, Result};
use crate::fem::{
    assemble_contact, assemble_film, assemble_mass, assemble_stiffness, element_load, CoefficientMap, ContactEdge,
    CsrMatrix,
};
use crate::mesh::{BoundaryTag, Mesh, Region};

/// Assembled, time-independent pieces of the discrete heat equation
///
/// `Mτ T̈ + M Ṫ + A T = F_film + F_Q (+ τ dF_Q/dt on relaxing regions)`,
///
/// where `A` is conduction plus every film term and `Mτ = τ·M` restricted
/// to the relaxing regions.
#[derive(Debug, Clone)]
pub struct ThermalOperators {
    pub mesh: Mesh,
    pub heat_capacity: CoefficientMap,
    /// `∫ρc φ_i φ_j 2πr`
    pub mass: CsrMatrix,
    /// Same as `mass` but only over the relaxing regions (without τ).
    pub relaxing_mass: CsrMatrix,
    pub relaxing_regions: Vec<Region>,
    /// Conduction plus films.
    pub conduction: CsrMatrix,
    /// Film load relative to `reference`: `Σ F_k (T_k − reference)`.
    pub film_load: Vec<f64>,
    /// Temperature the stepper solves relative to. A state resting at it
    /// under films toward it gives an exactly zero right-hand side.
    pub reference: f64,
    films: Vec<(CsrMatrix, f64)>,
    /// Nodal Joule load over all regions.
    pub source_load: Vec<f64>,
    /// Nodal Joule load over the relaxing regions.
    pub relaxing_source_load: Vec<f64>,
    /// Per-element source, W/m³.
    pub source: Vec<f64>,
    pub dirichlet: Vec<(usize, f64)>,
}

impl ThermalOperators {
    /// Conduction and capacity only: no films, sources, constraints or relaxation.
    pub fn new(mesh: Mesh, heat_capacity: CoefficientMap, conductivity: CoefficientMap, lumped: bool) -> Result<Self> {
        let mass = assemble_mass(&mesh, &heat_capacity, lumped)?;
        let conduction = assemble_stiffness(&mesh, &conductivity)?;
        let n = mesh.node_count();
        Ok(ThermalOperators {
            relaxing_mass: CsrMatrix::zeros(n),
            relaxing_regions: Vec::new(),
            film_load: vec![0.0; n],
            source_load: vec![0.0; n],
            relaxing_source_load: vec![0.0; n],
            source: vec![0.0; mesh.triangle_count()],
            dirichlet: Vec::new(),
            reference: 0.0,
            films: Vec::new(),
            heat_capacity,
            mass,
            conduction,
            mesh,
        })
    }

    pub fn node_count(&self) -> usize {
        self.mesh.node_count()
    }

    /// Marks `regions` as obeying the relaxed (hyperbolic) law.
    pub fn with_relaxation(mut self, regions: &[Region], lumped: bool) -> Result<Self> {
        let mut cap = CoefficientMap::uniform(0.0)?;
        for &r in regions {
            cap = cap.with(r, self.heat_capacity.get(r))?;
        }
        self.relaxing_mass = assemble_mass(&self.mesh, &cap, lumped)?;
        self.relaxing_regions = regions.to_vec();
        self.refresh_relaxing_load();
        Ok(self)
    }

    /// Film toward the fixed temperature `t_ref`; `matrix` is `∫ h φ_i φ_j 2πr ds`.
    pub fn with_film(mut self, matrix: &CsrMatrix, t_ref: f64) -> Self {
        self.conduction = CsrMatrix::combine(&[(1.0, &self.conduction), (1.0, matrix)]);
        self.films.push((matrix.clone(), t_ref));
        self.refresh_film_load();
        self
    }

    /// Film between two meshed sides, no fixed temperature involved.
    pub fn with_coupling(mut self, matrix: &CsrMatrix) -> Self {
        self.conduction = CsrMatrix::combine(&[(1.0, &self.conduction), (1.0, matrix)]);
        self
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = reference;
        self.refresh_film_load();
        self
    }

    fn refresh_film_load(&mut self) {
        let n = self.node_count();
        self.film_load = vec![0.0; n];
        for (m, t) in &self.films {
            let load = m.mul_vec(&vec![t - self.reference; n]);
            self.film_load.iter_mut().zip(load).for_each(|(a, b)| *a += b);
        }
    }

    pub fn with_dirichlet(mut self, nodes: impl IntoIterator<Item = usize>, value: f64) -> Self {
        self.dirichlet.extend(nodes.into_iter().map(|i| (i, value)));
        self
    }

    /// Piecewise-constant volumetric source, one value per element (W/m³).
    pub fn with_source(mut self, per_element: &[f64]) -> Result<Self> {
        if per_element.len() != self.mesh.triangle_count() {
            return Err(Error::InvalidParameter(format!(
                "source has {} values for {} elements",
                per_element.len(),
                self.mesh.triangle_count()
            )));
        }
        self.source = per_element.to_vec();
        self.source_load = element_load(&self.mesh, per_element);
        self.refresh_relaxing_load();
        Ok(self)
    }

    fn refresh_relaxing_load(&mut self) {
        let q: Vec<f64> = self
            .mesh
            .triangles
            .iter()
            .zip(&self.source)
            .map(|(t, &q)| if self.relaxing_regions.contains(&t.region) { q } else { 0.0 })
            .collect();
        self.relaxing_source_load = element_load(&self.mesh, &q);
    }

    /// Total source power, W.
    pub fn source_power(&self) -> f64 {
        self.source_load.iter().sum()
    }

    /// `∫ρc (T − reference) 2πr dA` over the whole mesh, from the mass matrix.
    pub fn stored_energy(&self, temperature: &[f64], reference: f64) -> f64 {
        let shifted: Vec<f64> = temperature.iter().map(|t| t - reference).collect();
        self.mass.mul_vec(&shifted).iter().sum()
    }

    /// Net heat leaving through the films toward fixed temperatures at
    /// state `temperature`, W. Contact films between meshed regions cancel.
    pub fn film_loss(&self, temperature: &[f64]) -> f64 {
        let shifted: Vec<f64> = temperature.iter().map(|t| t - self.reference).collect();
        self.conduction.mul_vec(&shifted).iter().sum::<f64>() - self.film_load.iter().sum::<f64>()
    }
}

/// Operators of the full ablation model on a split thermal mesh.
pub fn ablation_operators(
    thermal: &ThermalMesh,
    materials: &MaterialTable,
    bc: &BoundaryConditions,
    source: &JouleSource,
    lumped: bool,
) -> Result<ThermalOperators> {
    materials.validate()?;
    bc.validate()?;
    let mesh = &thermal.mesh;
    let film_h = |f: &FilmEdge| match f.tag {
        BoundaryTag::ElectrodeBloodInterface => bc.electrode_film(),
        _ => bc.muscle_film(),
    };
    let base = ThermalOperators::new(mesh.clone(), materials.heat_capacity()?, materials.conductivity()?, lumped)?
        .with_relaxation(&[Region::Muscle], lumped)?
        .with_reference(bc.t_initial);
    let ops = match bc.interface {
        InterfaceModel::ContactConductance => {
            let edges: Vec<ContactEdge> =
                thermal.films.iter().map(|f| ContactEdge { solid: f.solid, fluid: f.blood, h: film_h(f) }).collect();
            base.with_coupling(&assemble_contact(mesh, &edges)?)
        }
        InterfaceModel::BloodBath => {
            let edges: Vec<([usize; 2], f64)> = thermal.films.iter().map(|f| (f.solid, film_h(f))).collect();
            base.with_film(&assemble_film(mesh, &edges, bc.t_blood)?.0, bc.t_blood)
        }
    };
    let outer = mesh.nodes_with_tag(BoundaryTag::OuterGroundAndThermal);
    if outer.is_empty() {
        return Err(Error::UnknownTag(BoundaryTag::OuterGroundAndThermal));
    }
    let ops = match bc.interface {
        InterfaceModel::ContactConductance => ops.with_dirichlet(outer, bc.t_outer),
        InterfaceModel::BloodBath => {
            // the flowing blood is a bath: its nodes stay at t_blood
            let mut blood = vec![false; mesh.node_count()];
            for t in mesh.triangles.iter().filter(|t| t.region == Region::Blood) {
                t.nodes.iter().for_each(|&v| blood[v] = true);
            }
            let bath: Vec<usize> = (0..blood.len()).filter(|&v| blood[v]).collect();
            ops.with_dirichlet(bath, bc.t_blood).with_dirichlet(outer.into_iter().filter(|&v| !blood[v]), bc.t_outer)
        }
    };
    ops
        .with_source(&source.per_element)
}
