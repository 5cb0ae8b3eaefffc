//! Independent reference solutions for checking the finite-element solvers.

mod manufactured;
mod slab;

pub use manufactured::{Constant, DecayingMode, ExactSolution, LinearZ, Manufactured};
pub use slab::{crossing, oracle_be_1d, oracle_hbe_1d, Oracle1DConfig, SlabSeries, Table, SERIES_TOL};
