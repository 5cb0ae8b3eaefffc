//! Axisymmetric P1 finite elements: operator assembly and SPD solvers.
//!
//! Every volume integral carries the revolution weight `2πr`, every
//! boundary integral `2πr ds`. Both are integrated exactly for linear
//! shape functions.

mod assembly;
mod dirichlet;
mod solver;
mod sparse;

use crate::error::{Error, Result};
use crate::mesh::Region;

pub use assembly::{
    assemble_contact, assemble_film, assemble_mass, assemble_robin, assemble_stiffness, element_gradients,
    element_load, ContactEdge,
};
pub use dirichlet::DirichletSystem;
pub use solver::{pcg, solve_spd, Cholesky, SolveStats, SpdSolver, DEFAULT_MAX_ITER};
pub use sparse::{dot, norm2, CsrMatrix, TripletBuilder};

/// One scalar coefficient per region (k, ρc, σ, ...). A zero entry removes
/// the region from the operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientMap([f64; 3]);

impl CoefficientMap {
    /// Values in [`Region::ALL`] order: electrode, muscle, blood.
    pub fn new(electrode: f64, muscle: f64, blood: f64) -> Result<Self> {
        for (r, v) in Region::ALL.iter().zip([electrode, muscle, blood]) {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "coefficient for {} must be finite and non-negative, got {v}",
                    r.name()
                )));
            }
        }
        Ok(CoefficientMap([electrode, muscle, blood]))
    }

    pub fn uniform(v: f64) -> Result<Self> {
        Self::new(v, v, v)
    }

    pub fn get(&self, region: Region) -> f64 {
        self.0[region.index()]
    }

    pub fn with(mut self, region: Region, v: f64) -> Result<Self> {
        self.0[region.index()] = v;
        Self::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn scaled(self, s: f64) -> Result<Self> {
        Self::new(s * self.0[0], s * self.0[1], s * self.0[2])
    }

    /// Keeps only `region`.
    pub fn only(self, region: Region) -> Self {
        let mut out = [0.0; 3];
        out[region.index()] = self.0[region.index()];
        CoefficientMap(out)
    }
}
