use serde::{Deserialize, Serialize};

use super::ThermalOperators;
use crate::error::{Error, Result};
use crate::fem::{CsrMatrix, DirichletSystem, SolveStats, SpdSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Fourier conduction everywhere.
    #[serde(rename = "BE", alias = "be")]
    Be,
    /// Relaxed (Cattaneo–Vernotte) conduction in the relaxing regions.
    #[serde(rename = "HBE", alias = "hbe")]
    Hbe,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Be => "BE",
            Method::Hbe => "HBE",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the relaxed equation sees a source switched on at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HbeStart {
    /// `Ṫ(0) = 0` and no `τ ∂Q/∂t` contribution: heating ramps up over τ.
    #[default]
    Quiescent,
    /// The step in Q enters `τ ∂Q/∂t` as an impulse `τ Q / dt` in the first
    /// step, so the initial heating rate is `Q / ρc` as for Fourier conduction.
    Impulse,
}

/// Time-step parameters shared by both methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub dt: f64,
    /// Implicitness: 1 is backward Euler, 1/2 the trapezoidal rule.
    pub theta: f64,
    /// Relaxation time of the relaxing regions; ignored by [`Method::Be`].
    pub tau: f64,
    pub start: HbeStart,
    /// Relative residual for each linear solve.
    pub tol: f64,
}

impl StepControl {
    pub fn new(dt: f64) -> Self {
        StepControl { dt, theta: 1.0, tau: 0.0, start: HbeStart::default(), tol: 1e-10 }
    }

    pub fn theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn start(mut self, start: HbeStart) -> Self {
        self.start = start;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0.5, 1] for unconditional stability, got {}",
                self.theta
            )));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be >= 0, got {}", self.tau)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!("solver tolerance must lie in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    pub t: f64,
    pub step: usize,
    /// Nodal temperature, °C.
    pub temperature: Vec<f64>,
    /// Nodal `Ṫ`, K/s. Carried by [`Method::Hbe`] only.
    pub rate: Option<Vec<f64>>,
    pub method: Method,
}

impl ThermalState {
    pub fn uniform(nodes: usize, value: f64, method: Method) -> Self {
        ThermalState {
            t: 0.0,
            step: 0,
            temperature: vec![value; nodes],
            rate: (method == Method::Hbe).then(|| vec![0.0; nodes]),
            method,
        }
    }
}

/// Energy bookkeeping of one step, all in J.
///
/// `stored_change + relaxation_change = joule_input + impulse_input − film_loss − dirichlet_loss + residual`
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBalance {
    pub stored_change: f64,
    /// Change of `τ Σ ρc Ṫ vol` over the relaxing regions.
    pub relaxation_change: f64,
    pub joule_input: f64,
    pub impulse_input: f64,
    pub film_loss: f64,
    /// Heat drawn out through fixed-temperature nodes (their reactions).
    pub dirichlet_loss: f64,
    pub residual: f64,
}

impl EnergyBalance {
    pub fn throughput(&self) -> f64 {
        self.stored_change.abs()
            + self.relaxation_change.abs()
            + self.joule_input.abs()
            + self.impulse_input.abs()
            + self.film_loss.abs()
            + self.dirichlet_loss.abs()
    }

    /// `|residual| / throughput`; zero for a step in which nothing moves.
    pub fn relative_error(&self) -> f64 {
        let t = self.throughput();
        if t == 0.0 {
            0.0
        } else {
            self.residual.abs() / t
        }
    }
}

/// A method bound to fixed operators and step size, with the system
/// matrix factored once.
///
/// Both methods use the θ-form of the first-order system in `(T, Ṫ)`:
///
/// `T₁ − T₀ = dt (θ Ṫ₁ + (1−θ) Ṫ₀)`
/// `Mτ (Ṫ₁ − Ṫ₀)/dt + M (T₁ − T₀)/dt + A (θ T₁ + (1−θ) T₀) = F`
///
/// With `Mτ = 0` this is the θ-method for the parabolic equation, so the
/// relaxed path degenerates to the Fourier one at τ = 0.
pub struct Stepper<'a> {
    ops: &'a ThermalOperators,
    method: Method,
    ctl: StepControl,
    lhs: CsrMatrix,
    system: DirichletSystem,
    solver: SpdSolver,
}

impl<'a> Stepper<'a> {
    pub fn new(ops: &'a ThermalOperators, method: Method, ctl: StepControl) -> Result<Self> {
        ctl.validate()?;
        let (dt, theta) = (ctl.dt, ctl.theta);
        let tau = if method == Method::Hbe { ctl.tau } else { 0.0 };
        let mut terms: Vec<(f64, &CsrMatrix)> = Vec::with_capacity(3);
        if method == Method::Hbe {
            terms.push((tau / (theta * dt * dt), &ops.relaxing_mass));
        }
        terms.push((1.0 / dt, &ops.mass));
        terms.push((theta, &ops.conduction));
        let lhs = CsrMatrix::combine(&terms);
        let fixed: Vec<(usize, f64)> = ops.dirichlet.iter().map(|&(i, v)| (i, v - ops.reference)).collect();
        let system = DirichletSystem::new(&lhs, &fixed)?;
        if system.free_count() == 0 {
            return Err(Error::InvalidParameter("every node is fixed".into()));
        }
        let solver = SpdSolver::direct(system.matrix().clone(), ctl.tol)?;
        Ok(Stepper { ops, method, ctl: StepControl { tau, ..ctl }, lhs, system, solver })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn control(&self) -> &StepControl {
        &self.ctl
    }

    pub fn initial_state(&self, value: f64) -> ThermalState {
        let mut s = ThermalState::uniform(self.ops.node_count(), value, self.method);
        for &(i, v) in &self.ops.dirichlet {
            s.temperature[i] = v;
        }
        s
    }

    fn shifted(&self, temperature: &[f64]) -> Vec<f64> {
        temperature.iter().map(|t| t - self.ops.reference).collect()
    }

    fn impulse_applies(&self, state: &ThermalState) -> bool {
        self.method == Method::Hbe && self.ctl.start == HbeStart::Impulse && state.step == 0 && self.ctl.tau > 0.0
    }

    fn rhs(&self, state: &ThermalState) -> Result<Vec<f64>> {
        let ops = self.ops;
        let n = ops.node_count();
        if state.method != self.method {
            return Err(Error::InvalidParameter(format!(
                "state is for {} but the stepper runs {}",
                state.method, self.method
            )));
        }
        if state.temperature.len() != n {
            return Err(Error::InvalidParameter(format!(
                "state has {} nodes, operators {}",
                state.temperature.len(),
                n
            )));
        }
        let StepControl { dt, theta, tau, .. } = self.ctl;
        let t0 = &self.shifted(&state.temperature);
        let mut rhs = ops.mass.mul_vec(t0);
        rhs.iter_mut().for_each(|v| *v /= dt);
        if theta < 1.0 {
            let at = ops.conduction.mul_vec(t0);
            rhs.iter_mut().zip(at).for_each(|(r, a)| *r -= (1.0 - theta) * a);
        }
        for i in 0..n {
            rhs[i] += ops.film_load[i] + ops.source_load[i];
        }
        if self.method == Method::Hbe {
            let v0 = state
                .rate
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("relaxed state carries no rate".into()))?;
            if tau > 0.0 {
                let c = tau / (theta * dt * dt);
                let w: Vec<f64> =
                    (0..n).map(|i| c * (t0[i] + dt * (1.0 - theta) * v0[i]) + tau * v0[i] / dt).collect();
                let mw = ops.relaxing_mass.mul_vec(&w);
                rhs.iter_mut().zip(mw).for_each(|(r, m)| *r += m);
            }
            if self.impulse_applies(state) {
                for i in 0..n {
                    rhs[i] += tau * ops.relaxing_source_load[i] / dt;
                }
            }
        }
        Ok(rhs)
    }

    pub fn step(&self, state: &ThermalState) -> Result<ThermalState> {
        Ok(self.step_with_stats(state)?.0)
    }

    /// Step with an extra nodal load (already weighted to `t_{n+θ}`) added
    /// to the right-hand side.
    pub fn step_forced(&self, state: &ThermalState, load: &[f64]) -> Result<ThermalState> {
        Ok(self.advance(state, Some(load))?.0)
    }

    pub fn step_with_stats(&self, state: &ThermalState) -> Result<(ThermalState, SolveStats)> {
        self.advance(state, None)
    }

    fn advance(&self, state: &ThermalState, load: Option<&[f64]>) -> Result<(ThermalState, SolveStats)> {
        let mut rhs = self.rhs(state)?;
        if let Some(load) = load {
            if load.len() != rhs.len() {
                return Err(Error::InvalidParameter(format!(
                    "load has {} entries for {} nodes",
                    load.len(),
                    rhs.len()
                )));
            }
            rhs.iter_mut().zip(load).for_each(|(r, l)| *r += l);
        }
        let reduced = self.system.reduce_rhs(&rhs);
        let guess = self.system.restrict(&self.shifted(&state.temperature));
        let (x, stats) = self.solver.solve(&reduced, Some(&guess))?;
        let t1: Vec<f64> = self.system.expand(&x).into_iter().map(|v| v + self.ops.reference).collect();
        let rate = match self.method {
            Method::Be => None,
            Method::Hbe => {
                let StepControl { dt, theta, .. } = self.ctl;
                let v0 = state.rate.as_deref().unwrap_or(&[]);
                Some(
                    (0..t1.len())
                        .map(|i| {
                            let carry = if theta < 1.0 { dt * (1.0 - theta) * v0[i] } else { 0.0 };
                            (t1[i] - state.temperature[i] - carry) / (theta * dt)
                        })
                        .collect(),
                )
            }
        };
        let next = ThermalState {
            t: state.t + self.ctl.dt,
            step: state.step + 1,
            temperature: t1,
            rate,
            method: self.method,
        };
        Ok((next, stats))
    }

    /// Energy accounting of the step `before → after`.
    pub fn energy_balance(&self, before: &ThermalState, after: &ThermalState) -> Result<EnergyBalance> {
        let ops = self.ops;
        let StepControl { dt, theta, tau, .. } = self.ctl;
        let rhs = self.rhs(before)?;
        let lhs_t = self.lhs.mul_vec(&self.shifted(&after.temperature));
        let (mut free_res, mut fixed_res) = (0.0, 0.0);
        for i in 0..rhs.len() {
            let r = lhs_t[i] - rhs[i];
            if self.system.is_fixed(i) {
                fixed_res += r;
            } else {
                free_res += r;
            }
        }
        let delta: Vec<f64> = after.temperature.iter().zip(&before.temperature).map(|(a, b)| a - b).collect();
        let stored_change: f64 = ops.mass.mul_vec(&delta).iter().sum();
        let relaxation_change = match (&before.rate, &after.rate) {
            (Some(v0), Some(v1)) if self.method == Method::Hbe && tau > 0.0 => {
                let dv: Vec<f64> = v1.iter().zip(v0).map(|(a, b)| tau * (a - b)).collect();
                ops.relaxing_mass.mul_vec(&dv).iter().sum()
            }
            _ => 0.0,
        };
        let impulse_input = if self.impulse_applies(before) {
            tau * ops.relaxing_source_load.iter().sum::<f64>()
        } else {
            0.0
        };
        let film_loss = dt * (theta * ops.film_loss(&after.temperature) + (1.0 - theta) * ops.film_loss(&before.temperature));
        Ok(EnergyBalance {
            stored_change,
            relaxation_change,
            joule_input: dt * ops.source_power(),
            impulse_input,
            film_loss,
            dirichlet_loss: -dt * fixed_res,
            residual: dt * free_res,
        })
    }
}

/// One backward-Euler step of the Fourier equation.
pub fn step_be(state: &ThermalState, dt: f64, ops: &ThermalOperators) -> Result<ThermalState> {
    Stepper::new(ops, Method::Be, StepControl::new(dt))?.step(state)
}

/// One step of the relaxed equation with relaxation time `tau`, starting
/// quiescent.
pub fn step_hbe(state: &ThermalState, dt: f64, ops: &ThermalOperators, tau: f64) -> Result<ThermalState> {
    Stepper::new(ops, Method::Hbe, StepControl::new(dt).tau(tau))?.step(state)
}
