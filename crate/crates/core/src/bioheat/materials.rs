use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::CoefficientMap;
use crate::mesh::Region;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
    /// W/(m·K)
    pub conductivity: f64,
    /// S/m
    pub electrical_conductivity: f64,
}

impl Material {
    pub const fn new(density: f64, specific_heat: f64, conductivity: f64, electrical_conductivity: f64) -> Self {
        Material { density, specific_heat, conductivity, electrical_conductivity }
    }

    /// Volumetric heat capacity ρc, J/(m³·K).
    pub fn heat_capacity(&self) -> f64 {
        self.density * self.specific_heat
    }

    pub fn diffusivity(&self) -> f64 {
        self.conductivity / self.heat_capacity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialTable {
    pub electrode: Material,
    pub muscle: Material,
    pub blood: Material,
    /// Thermal relaxation time of muscle, s.
    pub tau_muscle: f64,
}

impl Default for MaterialTable {
    fn default() -> Self {
        MaterialTable {
            electrode: Material::new(21500.0, 132.0, 71.0, 4e6),
            muscle: Material::new(1200.0, 3200.0, 0.550, 0.222),
            blood: Material::new(1000.0, 4180.0, 0.543, 0.667),
            tau_muscle: 16.0,
        }
    }
}

impl MaterialTable {
    pub fn validate(&self) -> Result<()> {
        for region in Region::ALL {
            let m = self.get(region);
            for (name, v) in [
                ("density", m.density),
                ("specific_heat", m.specific_heat),
                ("conductivity", m.conductivity),
                ("electrical_conductivity", m.electrical_conductivity),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "{}.{name} must be positive, got {v}",
                        region.name()
                    )));
                }
            }
        }
        if !(self.tau_muscle.is_finite() && self.tau_muscle >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau_muscle must be >= 0, got {}",
                self.tau_muscle
            )));
        }
        Ok(())
    }

    pub fn get(&self, region: Region) -> &Material {
        match region {
            Region::Electrode => &self.electrode,
            Region::Muscle => &self.muscle,
            Region::Blood => &self.blood,
        }
    }

    fn map(&self, f: impl Fn(&Material) -> f64) -> Result<CoefficientMap> {
        CoefficientMap::new(f(&self.electrode), f(&self.muscle), f(&self.blood))
    }

    pub fn heat_capacity(&self) -> Result<CoefficientMap> {
        self.map(Material::heat_capacity)
    }

    pub fn conductivity(&self) -> Result<CoefficientMap> {
        self.map(|m| m.conductivity)
    }

    pub fn electrical_conductivity(&self) -> Result<CoefficientMap> {
        self.map(|m| m.electrical_conductivity)
    }

    /// Speed of the thermal wave in muscle, `sqrt(k / (ρc τ))`. Infinite when τ = 0.
    pub fn muscle_wave_speed(&self) -> f64 {
        (self.muscle.conductivity / (self.muscle.heat_capacity() * self.tau_muscle)).sqrt()
    }
}

/// How the blood films at the electrode and muscle surfaces are coupled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceModel {
    /// Two-sided film between the solids and a stagnant, conducting blood
    /// domain, `h (T_solid − T_blood)`.
    ContactConductance,
    /// The flowing blood is a bath held at `t_blood`; solids lose heat to
    /// it through the films.
    #[default]
    BloodBath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConditions {
    /// Electrode–blood film coefficient before scaling, W/(m²·K).
    pub h_e: f64,
    /// Muscle–blood film coefficient before scaling, W/(m²·K).
    pub h_c: f64,
    /// Multiplier applied to both films.
    pub convection_ratio: f64,
    pub t_blood: f64,
    pub t_outer: f64,
    pub t_initial: f64,
    pub interface: InterfaceModel,
}

impl Default for BoundaryConditions {
    fn default() -> Self {
        BoundaryConditions {
            h_e: 2000.0,
            h_c: 40000.0,
            convection_ratio: 1.0,
            t_blood: 37.0,
            t_outer: 37.0,
            t_initial: 37.0,
            interface: InterfaceModel::BloodBath,
        }
    }
}

impl BoundaryConditions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("h_e", self.h_e), ("h_c", self.h_c), ("convection_ratio", self.convection_ratio)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [("t_blood", self.t_blood), ("t_outer", self.t_outer), ("t_initial", self.t_initial)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn electrode_film(&self) -> f64 {
        self.convection_ratio * self.h_e
    }

    pub fn muscle_film(&self) -> f64 {
        self.convection_ratio * self.h_c
    }
}
