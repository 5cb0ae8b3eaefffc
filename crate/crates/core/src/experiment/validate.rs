//! Self-checks run by `ablation validate`: oracles, formulation
//! equivalence, convergence order, power and energy bookkeeping.

use std::fmt;
use std::time::Instant;

use crate::bioheat::{Material, MaterialTable, Method, Model, SimulationConfig, StepControl, Stepper, ThermalOperators};
use crate::electric::{electrode_power, solve_potential};
use crate::error::{Error, Result};
use crate::fem::CoefficientMap;
use crate::mesh::{rectangle, BoundaryTag, Mesh, RectangleSpec, Region};
use crate::oracles::{crossing, oracle_be_1d, oracle_hbe_1d, DecayingMode, Manufactured, Oracle1DConfig, SlabSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    /// `|measured − target| <= rel·|target|`
    Near { target: f64, rel: f64 },
}

impl Bound {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
            Bound::Near { target, rel } => (v - target).abs() <= rel * target.abs(),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::AtMost(b) => write!(f, "<= {b:.3e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:.3e}"),
            Bound::Near { target, rel } => write!(f, "{target:.4e} ± {:.1}%", 100.0 * rel),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// NaN when the check itself failed to run.
    pub measured: f64,
    pub bound: Bound,
    pub seconds: f64,
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.bound.holds(self.measured)
    }

    fn timed(name: &'static str, bound: Bound, f: impl FnOnce() -> Result<f64>) -> Check {
        let start = Instant::now();
        let res = f();
        let seconds = start.elapsed().as_secs_f64();
        match res {
            Ok(measured) => Check { name, measured, bound, seconds, error: None },
            Err(e) => Check { name, measured: f64::NAN, bound, seconds, error: Some(e.to_string()) },
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status}  {:<34} measured {:<12.4e} required {:<22} ({:.2} s)",
            self.name,
            self.measured,
            self.bound.to_string(),
            self.seconds
        )?;
        if let Some(e) = &self.error {
            write!(f, "  error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Runs every check on `config` (normally the default configuration).
pub fn run_validation(config: &SimulationConfig) -> ValidationReport {
    let theory = config.materials.muscle_wave_speed();
    let muscle = config.materials.muscle;
    let checks = vec![
        Check::timed("oracle: series vs explicit tau = 0", Bound::AtMost(1e-4), || {
            oracle_self_consistency(muscle)
        }),
        Check::timed("oracle: relaxed grid independence", Bound::AtMost(1e-4), || {
            oracle_grid_independence(muscle, config.materials.tau_muscle)
        }),
        Check::timed("oracle: front speed", Bound::Near { target: theory, rel: 0.05 }, || {
            oracle_front_speed(&config.materials)
        }),
        Check::timed("fem vs parabolic slab, rel L2", Bound::AtMost(0.01), || parabolic_slab_error(muscle)),
        Check::timed("fem front speed", Bound::Near { target: theory, rel: 0.05 }, || {
            fem_front_speed(&config.materials)
        }),
        Check::timed("tau = 0 equivalence, max |dT| K", Bound::AtMost(1e-6), || {
            tau_zero_equivalence(config, 10.0)
        }),
        Check::timed("manufactured solution order", Bound::AtLeast(1.8), || manufactured_order(muscle)),
        Check::timed("electrode vs Joule power, rel", Bound::AtMost(0.02), || power_balance(config)),
        Check::timed("discrete energy balance, rel", Bound::AtMost(1e-6), || energy_balance(config, 20)),
    ];
    ValidationReport { checks }
}

const FRONT_LENGTH: f64 = 8e-3;
const FRONT_STEP: f64 = 10.0;
const FRONT_WINDOW: (f64, f64) = (10.0, 40.0);

fn slab_config(material: Material) -> Oracle1DConfig {
    Oracle1DConfig {
        length: FRONT_LENGTH,
        material,
        tau: 0.0,
        t_initial: 37.0,
        bump: 0.0,
        t_left: 60.0,
        t_right: 37.0,
        source: 1e6,
        cells: 200,
        dt: 0.0,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest gap between the Fourier series and the relaxed explicit scheme
/// run with `τ = 0` on a fine grid.
pub fn oracle_self_consistency(material: Material) -> Result<f64> {
    let mut cfg = Oracle1DConfig { cells: 800, ..slab_config(material) };
    cfg.dt = cfg.stable_dt() / 3.0;
    let times = [5.0, 20.0];
    let fd = oracle_hbe_1d(&cfg, &times)?;
    let series = oracle_be_1d(&cfg, &fd.times)?;
    Ok(fd.max_difference(&series))
}

/// Change of the relaxed oracle under halving of dx and dt, for a smooth
/// initial bump between ends held at the initial temperature.
pub fn oracle_grid_independence(material: Material, tau: f64) -> Result<f64> {
    let base =
        Oracle1DConfig { tau, t_left: 37.0, bump: 10.0, source: 0.0, cells: 400, ..slab_config(material) };
    let times = [10.0, 30.0];
    // both grids must land exactly on the output times
    let dt = times[0] / (2.0 * times[0] / base.stable_dt()).ceil();
    let coarse = Oracle1DConfig { dt, ..base };
    let fine = Oracle1DConfig { cells: 800, dt: dt / 2.0, ..base };
    let a = oracle_hbe_1d(&coarse, &times)?;
    let b = oracle_hbe_1d(&fine, &times)?;
    let mut worst: f64 = 0.0;
    for (k, row) in a.values.iter().enumerate() {
        for (i, &x) in a.x.iter().enumerate() {
            worst = worst.max((row[i] - b.at(k, x)).abs());
        }
    }
    Ok(worst)
}

/// Half-amplitude level of a damped step wave at time `t`.
fn front_level(t: f64, tau: f64) -> f64 {
    37.0 + 0.5 * FRONT_STEP * (-t / (2.0 * tau)).exp()
}

fn front_slope(x: &[f64], rows: [&[f64]; 2], tau: f64) -> Result<f64> {
    let (t0, t1) = FRONT_WINDOW;
    let find = |row: &[f64], t: f64| {
        crossing(x, row, front_level(t, tau))
            .ok_or_else(|| Error::InvalidParameter(format!("no front found at t = {t}")))
    };
    Ok((find(rows[1], t1)? - find(rows[0], t0)?) / (t1 - t0))
}

/// Speed of a step pulse front in the explicit relaxed oracle, m/s.
pub fn oracle_front_speed(materials: &MaterialTable) -> Result<f64> {
    let mut cfg = Oracle1DConfig {
        length: FRONT_LENGTH,
        material: materials.muscle,
        tau: materials.tau_muscle,
        t_initial: 37.0,
        bump: 0.0,
        t_left: 37.0 + FRONT_STEP,
        t_right: 37.0,
        source: 0.0,
        cells: 1600,
        dt: 0.0,
    };
    cfg.dt = cfg.stable_dt() / 2.0;
    let table = oracle_hbe_1d(&cfg, &[FRONT_WINDOW.0, FRONT_WINDOW.1])?;
    front_slope(&table.x, [&table.values[0], &table.values[1]], cfg.tau)
}

/// A one-cell-wide muscle column along z, heat flowing only axially.
fn column(length: f64, cells: usize) -> Result<Mesh> {
    rectangle(&RectangleSpec::new((0.0, length / cells as f64), (0.0, length), 1, cells).sides([
        Some(BoundaryTag::Axis),
        None,
        Some(BoundaryTag::OuterGroundAndThermal),
        Some(BoundaryTag::ElectrodeSurface),
    ]))
}

/// Nodes on the axis ordered by z, as `(z, index)`.
fn axis_nodes(mesh: &Mesh) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> =
        mesh.nodes.iter().enumerate().filter(|(_, p)| p.r == 0.0).map(|(i, p)| (p.z, i)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

fn column_operators(mesh: &Mesh, material: Material, ends: (f64, f64), relaxing: bool) -> Result<ThermalOperators> {
    let mut ops = ThermalOperators::new(
        mesh.clone(),
        CoefficientMap::uniform(material.heat_capacity())?,
        CoefficientMap::uniform(material.conductivity)?,
        false,
    )?;
    if relaxing {
        ops = ops.with_relaxation(&[Region::Muscle], false)?;
    }
    Ok(ops
        .with_dirichlet(mesh.nodes_with_tag(BoundaryTag::OuterGroundAndThermal), ends.0)
        .with_dirichlet(mesh.nodes_with_tag(BoundaryTag::ElectrodeSurface), ends.1))
}

/// FEM column against the Fourier series for the same slab, relative L2
/// of the error over the temperature rise, worst of three times.
pub fn parabolic_slab_error(material: Material) -> Result<f64> {
    let cfg = slab_config(material);
    let series = SlabSeries::new(cfg)?;
    let mesh = column(cfg.length, 100)?;
    let ops = column_operators(&mesh, material, (cfg.t_left, cfg.t_right), false)?
        .with_source(&vec![cfg.source; mesh.triangle_count()])?;
    let dt = 0.01;
    let stepper = Stepper::new(&ops, Method::Be, StepControl::new(dt))?;
    let axis = axis_nodes(&mesh);
    let mut state = stepper.initial_state(cfg.t_initial);
    let mut worst: f64 = 0.0;
    let checkpoints = [5.0, 20.0, 60.0];
    let last = (checkpoints[2] / dt).round() as usize;
    for n in 1..=last {
        state = stepper.step(&state)?;
        let t = n as f64 * dt;
        if checkpoints.iter().any(|&c| (c - t).abs() < 0.5 * dt) {
            let (mut num, mut den) = (0.0, 0.0);
            for &(z, i) in &axis {
                let exact = series.value(z, t)?;
                num += (state.temperature[i] - exact).powi(2);
                den += (exact - cfg.t_initial).powi(2);
            }
            worst = worst.max((num / den).sqrt());
        }
    }
    Ok(worst)
}

/// Speed of a step pulse front through a relaxing FEM column, m/s.
pub fn fem_front_speed(materials: &MaterialTable) -> Result<f64> {
    let mesh = column(FRONT_LENGTH, 800)?;
    let ops = column_operators(&mesh, materials.muscle, (37.0 + FRONT_STEP, 37.0), true)?;
    let dt = 0.02;
    let ctl = StepControl::new(dt).theta(0.5).tau(materials.tau_muscle);
    let stepper = Stepper::new(&ops, Method::Hbe, ctl)?;
    let axis = axis_nodes(&mesh);
    let z: Vec<f64> = axis.iter().map(|a| a.0).collect();
    let mut state = stepper.initial_state(37.0);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut n = 0;
    for target in [FRONT_WINDOW.0, FRONT_WINDOW.1] {
        while (n as f64 * dt) < target - 0.5 * dt {
            state = stepper.step(&state)?;
            n += 1;
        }
        rows.push(axis.iter().map(|&(_, i)| state.temperature[i]).collect());
    }
    front_slope(&z, [&rows[0], &rows[1]], materials.tau_muscle)
}

/// Largest nodal gap between the Fourier path and the relaxed path at
/// `τ = 0` over a run of `t_end` seconds.
pub fn tau_zero_equivalence(config: &SimulationConfig, t_end: f64) -> Result<f64> {
    let mut cfg = config.clone();
    cfg.t_end = t_end;
    cfg.materials.tau_muscle = 0.0;
    let model = Model::build(&cfg)?;
    let be = model.stepper(Method::Be)?;
    let hbe = model.stepper(Method::Hbe)?;
    let mut a = be.initial_state(cfg.t_initial);
    let mut b = hbe.initial_state(cfg.t_initial);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.steps() {
        a = be.step(&a)?;
        b = hbe.step(&b)?;
        worst = worst.max(max_abs_diff(&a.temperature, &b.temperature));
    }
    Ok(worst)
}

/// Observed order of the Fourier FEM on a manufactured mode, lowest over
/// three refinements.
pub fn manufactured_order(material: Material) -> Result<f64> {
    let errors = manufactured_errors(material, &[4, 8, 16, 32])?;
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min))
}

/// Weighted L2 errors of the manufactured mode on `n × n` grids.
pub fn manufactured_errors(material: Material, grids: &[usize]) -> Result<Vec<f64>> {
    let (radius, length) = (0.01, 0.008);
    let exact = DecayingMode { base: 37.0, amplitude: 10.0, radius, length, decay: 20.0, radial: true };
    let mms = Manufactured {
        exact,
        heat_capacity: material.heat_capacity(),
        conductivity: material.conductivity,
        tau: 0.0,
    };
    grids
        .iter()
        .map(|&n| {
            let mesh = rectangle(&RectangleSpec::new((0.0, radius), (0.0, length), n, n).sides([
                Some(BoundaryTag::Axis),
                Some(BoundaryTag::OuterGroundAndThermal),
                Some(BoundaryTag::OuterGroundAndThermal),
                Some(BoundaryTag::OuterGroundAndThermal),
            ]))?;
            let fixed = mesh.nodes_with_tag(BoundaryTag::OuterGroundAndThermal);
            mms.fem_error(&mesh, &fixed, Method::Be, StepControl::new(0.05).theta(0.5), 5.0)
        })
        .collect()
}

/// Relative gap between the power drawn at the electrode and the Joule
/// heat integrated over the tissue.
pub fn power_balance(config: &SimulationConfig) -> Result<f64> {
    let model = Model::build(config)?;
    let sigma = config.materials.electrical_conductivity()?;
    let field = solve_potential(&model.mesh, &sigma, config.applied_voltage)?;
    let drawn = electrode_power(&model.mesh, &field, &sigma)?;
    let total = model.source.total_power;
    if total == 0.0 {
        return Ok(drawn.abs());
    }
    Ok((drawn - total).abs() / total)
}

/// Worst per-step relative energy residual over `steps` steps of each method.
pub fn energy_balance(config: &SimulationConfig, steps: usize) -> Result<f64> {
    let model = Model::build(config)?;
    let mut worst: f64 = 0.0;
    for method in [Method::Be, Method::Hbe] {
        let stepper = model.stepper(method)?;
        let mut state = stepper.initial_state(config.t_initial);
        for _ in 0..steps {
            let next = stepper.step(&state)?;
            worst = worst.max(stepper.energy_balance(&state, &next)?.relative_error());
            state = next;
        }
    }
    Ok(worst)
}
