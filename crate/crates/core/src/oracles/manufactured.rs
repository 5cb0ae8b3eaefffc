use std::f64::consts::PI;

use crate::bioheat::{Method, StepControl, Stepper, ThermalOperators, ThermalState};
use crate::error::Result;
use crate::fem::{assemble_mass, CoefficientMap};
use crate::mesh::Mesh;

/// A smooth axisymmetric temperature field with its derivatives.
pub trait ExactSolution {
    fn value(&self, r: f64, z: f64, t: f64) -> f64;
    /// `∂T/∂t`
    fn rate(&self, r: f64, z: f64, t: f64) -> f64;
    /// `∂²T/∂t²`
    fn acceleration(&self, r: f64, z: f64, t: f64) -> f64;
    /// `T_rr + T_r / r + T_zz`
    fn laplacian(&self, r: f64, z: f64, t: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ExactSolution for Constant {
    fn value(&self, _: f64, _: f64, _: f64) -> f64 {
        self.0
    }
    fn rate(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
    fn acceleration(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
    fn laplacian(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// `a + b z`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearZ {
    pub a: f64,
    pub b: f64,
}

impl ExactSolution for LinearZ {
    fn value(&self, _: f64, z: f64, _: f64) -> f64 {
        self.a + self.b * z
    }
    fn rate(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
    fn acceleration(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
    fn laplacian(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// `base + amplitude · cos(πr / 2R) · sin(πz / L) · e^{−t/t0}` on
/// `[0, R] × [0, L]`. It equals `base` on `r = R`, `z = 0` and `z = L`, and
/// is flat at the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayingMode {
    pub base: f64,
    pub amplitude: f64,
    pub radius: f64,
    pub length: f64,
    /// Decay time, s.
    pub decay: f64,
    /// Use `cos(πr/2R)` (false gives a field independent of r).
    pub radial: bool,
}

impl DecayingMode {
    fn kr(&self) -> f64 {
        PI / (2.0 * self.radius)
    }

    fn kz(&self) -> f64 {
        PI / self.length
    }

    fn shape(&self, r: f64, z: f64) -> f64 {
        let radial = if self.radial { (self.kr() * r).cos() } else { 1.0 };
        radial * (self.kz() * z).sin()
    }

    fn envelope(&self, t: f64) -> f64 {
        self.amplitude * (-t / self.decay).exp()
    }
}

impl ExactSolution for DecayingMode {
    fn value(&self, r: f64, z: f64, t: f64) -> f64 {
        self.base + self.envelope(t) * self.shape(r, z)
    }

    fn rate(&self, r: f64, z: f64, t: f64) -> f64 {
        -self.envelope(t) * self.shape(r, z) / self.decay
    }

    fn acceleration(&self, r: f64, z: f64, t: f64) -> f64 {
        self.envelope(t) * self.shape(r, z) / (self.decay * self.decay)
    }

    fn laplacian(&self, r: f64, z: f64, t: f64) -> f64 {
        let (kr, kz) = (self.kr(), self.kz());
        let sz = (kz * z).sin();
        let mut lap = -kz * kz * self.shape(r, z);
        if self.radial {
            // (cos kr r)'' + (cos kr r)'/r; the second term tends to −kr² on the axis
            let radial_part = if r > 0.0 {
                -kr * kr * (kr * r).cos() - kr * (kr * r).sin() / r
            } else {
                -2.0 * kr * kr
            };
            lap += radial_part * sz;
        }
        self.envelope(t) * lap
    }
}

/// Forcing that makes `exact` solve `τρc T̈ + ρc Ṫ = k ΔT + G` for one
/// uniform material. With `tau = 0` this is the Fourier equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured<S> {
    pub exact: S,
    pub heat_capacity: f64,
    pub conductivity: f64,
    pub tau: f64,
}

impl<S: ExactSolution> Manufactured<S> {
    pub fn forcing(&self, r: f64, z: f64, t: f64) -> f64 {
        let e = &self.exact;
        self.tau * self.heat_capacity * e.acceleration(r, z, t) + self.heat_capacity * e.rate(r, z, t)
            - self.conductivity * e.laplacian(r, z, t)
    }

    pub fn sample(&self, mesh: &Mesh, t: f64) -> Vec<f64> {
        mesh.nodes.iter().map(|p| self.exact.value(p.r, p.z, t)).collect()
    }

    /// Runs the FEM on `mesh` (one region) from the exact data at `t = 0`
    /// to `t_end`, with the exact values held on `fixed` nodes, and returns
    /// the weighted L2 error `sqrt(∫ (T_h − T*)² 2πr dA)` at `t_end`.
    pub fn fem_error(&self, mesh: &Mesh, fixed: &[usize], method: Method, ctl: StepControl, t_end: f64) -> Result<f64> {
        let rho_c = CoefficientMap::uniform(self.heat_capacity)?;
        let k = CoefficientMap::uniform(self.conductivity)?;
        let mut ops = ThermalOperators::new(mesh.clone(), rho_c, k, false)?;
        if method == Method::Hbe {
            let mut regions: Vec<_> = mesh.triangles.iter().map(|t| t.region).collect();
            regions.sort();
            regions.dedup();
            ops = ops.with_relaxation(&regions, false)?;
        }
        let ops = fixed.iter().fold(ops, |o, &i| {
            let p = mesh.nodes[i];
            o.with_dirichlet([i], self.exact.value(p.r, p.z, 0.0))
        });
        let ctl = StepControl { tau: self.tau, ..ctl };
        let stepper = Stepper::new(&ops, method, ctl)?;
        let unit = assemble_mass(mesh, &CoefficientMap::uniform(1.0)?, false)?;
        let load_at = |t: f64| {
            let f: Vec<f64> = mesh.nodes.iter().map(|p| self.forcing(p.r, p.z, t)).collect();
            unit.mul_vec(&f)
        };

        let mut state = ThermalState {
            t: 0.0,
            step: 0,
            temperature: self.sample(mesh, 0.0),
            rate: (method == Method::Hbe)
                .then(|| mesh.nodes.iter().map(|p| self.exact.rate(p.r, p.z, 0.0)).collect()),
            method,
        };
        let steps = (t_end / ctl.dt).round() as usize;
        let mut f0 = load_at(0.0);
        for n in 1..=steps {
            let t1 = n as f64 * ctl.dt;
            let f1 = load_at(t1);
            let load: Vec<f64> = f0.iter().zip(&f1).map(|(a, b)| (1.0 - ctl.theta) * a + ctl.theta * b).collect();
            state = stepper.step_forced(&state, &load)?;
            f0 = f1;
        }
        let err: Vec<f64> = state
            .temperature
            .iter()
            .zip(self.sample(mesh, state.t))
            .map(|(a, b)| a - b)
            .collect();
        let e2: f64 = unit.mul_vec(&err).iter().zip(&err).map(|(a, b)| a * b).sum();
        Ok(e2.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear_fields_need_no_forcing() {
        let c = Manufactured { exact: Constant(37.0), heat_capacity: 3.84e6, conductivity: 0.55, tau: 16.0 };
        assert_eq!(c.forcing(0.3, 0.2, 1.0), 0.0);
        let l = Manufactured { exact: LinearZ { a: 37.0, b: 100.0 }, heat_capacity: 3.84e6, conductivity: 0.55, tau: 0.0 };
        assert_eq!(l.forcing(0.0, 0.01, 5.0), 0.0);
    }

    #[test]
    fn mode_laplacian_matches_finite_differences() {
        let m = DecayingMode { base: 37.0, amplitude: 5.0, radius: 0.01, length: 0.008, decay: 20.0, radial: true };
        let (r, z, t, h) = (0.0031, 0.0027, 3.0, 1e-6);
        let f = |r: f64, z: f64| m.value(r, z, t);
        let fd = (f(r + h, z) - 2.0 * f(r, z) + f(r - h, z)) / (h * h)
            + (f(r + h, z) - f(r - h, z)) / (2.0 * h * r)
            + (f(r, z + h) - 2.0 * f(r, z) + f(r, z - h)) / (h * h);
        assert!((fd - m.laplacian(r, z, t)).abs() < 1e-4 * m.laplacian(r, z, t).abs());
        // on the axis, by symmetry: 2 T_rr + T_zz
        let axis = 4.0 * (f(h, z) - f(0.0, z)) / (h * h) + (f(0.0, z + h) - 2.0 * f(0.0, z) + f(0.0, z - h)) / (h * h);
        assert!((axis - m.laplacian(0.0, z, t)).abs() < 1e-3 * axis.abs());
    }
}
