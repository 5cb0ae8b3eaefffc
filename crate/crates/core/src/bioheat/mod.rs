//! Transient heat transfer in the ablation model.
//!
//! Fourier conduction (BE) everywhere, or relaxed Cattaneo–Vernotte
//! conduction (HBE) in the muscle with Fourier conduction in blood and
//! electrode:
//!
//! `τρc T̈ + ρc Ṫ = ∇·(k∇T) + Q + τ ∂Q/∂t` in muscle, `ρc Ṫ = ∇·(k∇T) + Q` elsewhere.

mod materials;
mod operators;
mod split;
mod stepping;
mod transient;

pub use materials::{BoundaryConditions, InterfaceModel, Material, MaterialTable};
pub use operators::{ablation_operators, ThermalOperators};
pub use split::{FilmEdge, ThermalMesh};
pub use stepping::{step_be, step_hbe, EnergyBalance, HbeStart, Method, StepControl, Stepper, ThermalState};
pub use transient::{run_transient, Model, RunFailure, SimulationConfig};
