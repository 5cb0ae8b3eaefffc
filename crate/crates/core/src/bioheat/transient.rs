use serde::{Deserialize, Serialize};

use super::{
    ablation_operators, BoundaryConditions, HbeStart, InterfaceModel, MaterialTable, Method, StepControl, Stepper,
    ThermalMesh, ThermalOperators, ThermalState,
};
use crate::electric::{joule_heat, solve_potential, JouleSource, PotentialField};
use crate::error::{Error, Result};
use crate::mesh::{build_geometry, Mesh, ModelGeometry, Node, DEFAULT_TARGET_EDGE_LENGTH};
use crate::postprocess::{lesion_metrics, max_temperature, probe, region_energy, TimeSeriesRecord};

/// One simulation. Defaults reproduce the reference experiment: 30 V, ratio 1.0, 120 s at dt 0.1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub method: Method,
    /// V
    pub applied_voltage: f64,
    pub convection_ratio: f64,
    /// s
    pub dt: f64,
    /// s
    pub t_end: f64,
    /// Edge length at the electrode surface, m.
    pub target_edge_length: f64,
    pub solver_tol: f64,
    pub lumped_mass: bool,
    /// Below the muscle's upper surface along the axis, m.
    pub probe_depths: Vec<f64>,
    /// °C
    pub lesion_threshold: f64,
    /// Implicitness of the time scheme, in [0.5, 1].
    pub theta: f64,
    pub hbe_start: HbeStart,
    pub interface: InterfaceModel,
    /// Emit a record every `output_stride` steps.
    pub output_stride: usize,
    /// Times at which full temperature fields are kept, s.
    pub snapshot_times: Vec<f64>,
    /// W/(m²·K), before the convection ratio.
    pub h_e: f64,
    pub h_c: f64,
    pub t_blood: f64,
    pub t_outer: f64,
    pub t_initial: f64,
    pub geometry: ModelGeometry,
    pub materials: MaterialTable,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let bc = BoundaryConditions::default();
        SimulationConfig {
            method: Method::Be,
            applied_voltage: 30.0,
            convection_ratio: bc.convection_ratio,
            dt: 0.1,
            t_end: 120.0,
            target_edge_length: DEFAULT_TARGET_EDGE_LENGTH,
            solver_tol: 1e-10,
            lumped_mass: false,
            probe_depths: vec![1.3e-3, 2.6e-3, 5.2e-3],
            lesion_threshold: 50.0,
            theta: 1.0,
            hbe_start: HbeStart::default(),
            interface: bc.interface,
            output_stride: 1,
            snapshot_times: Vec::new(),
            h_e: bc.h_e,
            h_c: bc.h_c,
            t_blood: bc.t_blood,
            t_outer: bc.t_outer,
            t_initial: bc.t_initial,
            geometry: ModelGeometry::default(),
            materials: MaterialTable::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.applied_voltage.is_finite() && self.applied_voltage >= 0.0) {
            return bad(format!("applied_voltage must be >= 0, got {}", self.applied_voltage));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return bad(format!("t_end must be >= dt, got {}", self.t_end));
        }
        if !(self.target_edge_length.is_finite() && self.target_edge_length > 0.0) {
            return bad(format!("target_edge_length must be > 0, got {}", self.target_edge_length));
        }
        if !(self.lesion_threshold > self.t_initial) {
            return bad(format!(
                "lesion_threshold {} must exceed the initial temperature {}",
                self.lesion_threshold, self.t_initial
            ));
        }
        if self.output_stride == 0 {
            return bad("output_stride must be >= 1".into());
        }
        for &t in &self.snapshot_times {
            if !(t > 0.0 && t <= self.t_end) {
                return bad(format!("snapshot time {t} lies outside (0, t_end]"));
            }
        }
        for &d in &self.probe_depths {
            if !(d >= 0.0 && d <= self.geometry.tissue_thickness) {
                return bad(format!("probe depth {d} lies outside the muscle"));
            }
        }
        self.geometry.validate()?;
        self.materials.validate()?;
        self.boundary_conditions().validate()?;
        self.step_control().validate()
    }

    pub fn boundary_conditions(&self) -> BoundaryConditions {
        BoundaryConditions {
            h_e: self.h_e,
            h_c: self.h_c,
            convection_ratio: self.convection_ratio,
            t_blood: self.t_blood,
            t_outer: self.t_outer,
            t_initial: self.t_initial,
            interface: self.interface,
        }
    }

    pub fn step_control(&self) -> StepControl {
        StepControl::new(self.dt)
            .theta(self.theta)
            .tau(self.materials.tau_muscle)
            .start(self.hbe_start)
            .tol(self.solver_tol)
    }

    /// Number of time steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

/// A failed run: the records produced before the failure, and the cause.
#[derive(Debug, thiserror::Error)]
#[error("run stopped after {} records: {error}", records.len())]
pub struct RunFailure {
    pub records: Vec<TimeSeriesRecord>,
    #[source]
    pub error: Error,
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure { records: Vec::new(), error }
    }
}

/// Mesh, heat source and thermal operators of one configuration, ready to
/// run with either method.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: SimulationConfig,
    pub mesh: Mesh,
    pub thermal: ThermalMesh,
    pub potential: PotentialField,
    pub source: JouleSource,
    pub operators: ThermalOperators,
    pub probe_points: Vec<Node>,
    /// Joule power per region, W.
    pub region_power: [f64; 3],
}

impl Model {
    pub fn build(config: &SimulationConfig) -> Result<Model> {
        config.validate()?;
        let mesh =
            build_geometry(&config.geometry, config.target_edge_length).map_err(Error::stage("mesh"))?;
        Self::with_mesh(config, mesh)
    }

    /// Uses a prebuilt mesh of `config.geometry` (shared across sweep points).
    pub fn with_mesh(config: &SimulationConfig, mesh: Mesh) -> Result<Model> {
        config.validate()?;
        let sigma = config.materials.electrical_conductivity()?;
        let potential =
            solve_potential(&mesh, &sigma, config.applied_voltage).map_err(Error::stage("potential"))?;
        let source = joule_heat(&mesh, &potential, &sigma).map_err(Error::stage("joule heat"))?;
        let thermal = ThermalMesh::split(&mesh).map_err(Error::stage("interface split"))?;
        let operators = ablation_operators(
            &thermal,
            &config.materials,
            &config.boundary_conditions(),
            &source,
            config.lumped_mass,
        )
        .map_err(Error::stage("thermal operators"))?;
        let probe_points =
            config.probe_depths.iter().map(|&d| Node::new(0.0, config.geometry.depth_to_z(d))).collect();
        let region_power = source.region_power(&mesh);
        Ok(Model { config: config.clone(), mesh, thermal, potential, source, operators, probe_points, region_power })
    }

    /// Temperatures on the nodes of `self.mesh`; interface nodes report
    /// their solid side.
    pub fn parent_temperature(&self, state: &ThermalState) -> Vec<f64> {
        state.temperature[..self.thermal.parent_node_count()].to_vec()
    }

    pub fn stepper(&self, method: Method) -> Result<Stepper<'_>> {
        Stepper::new(&self.operators, method, self.config.step_control())
    }

    pub fn record(&self, state: &ThermalState, joule_energy: [f64; 3]) -> Result<TimeSeriesRecord> {
        let mesh = &self.operators.mesh;
        let t = &state.temperature;
        let probes = self
            .probe_points
            .iter()
            .map(|&p| probe(mesh, t, p))
            .collect::<Result<Vec<f64>>>()?;
        Ok(TimeSeriesRecord {
            t: state.t,
            lesion: lesion_metrics(mesh, t, self.config.lesion_threshold),
            peak: max_temperature(mesh, t),
            probes,
            stored_energy: region_energy(mesh, t, &self.operators.heat_capacity, self.config.t_initial),
            joule_energy,
        })
    }

    /// Steps from the uniform initial temperature to `t_end`. `observe` sees
    /// every state, including the initial one.
    pub fn run_observed(
        &self,
        method: Method,
        mut observe: impl FnMut(&ThermalState),
    ) -> Result<Vec<TimeSeriesRecord>, RunFailure> {
        let stepper = self.stepper(method).map_err(Error::stage("factorisation"))?;
        let mut state = stepper.initial_state(self.config.t_initial);
        observe(&state);
        let steps = self.config.steps();
        let mut records = Vec::with_capacity(steps / self.config.output_stride + 1);
        let mut joule = [0.0; 3];
        for n in 1..=steps {
            state = match stepper.step(&state) {
                Ok(s) => s,
                Err(e) => return Err(RunFailure { records, error: Error::stage("time step")(e) }),
            };
            // keep the clock on the grid rather than accumulating dt
            state.t = ((n as f64 * self.config.dt) * 1e9).round() / 1e9;
            for (j, p) in joule.iter_mut().zip(self.region_power) {
                *j += self.config.dt * p;
            }
            observe(&state);
            if n % self.config.output_stride == 0 || n == steps {
                match self.record(&state, joule) {
                    Ok(r) => records.push(r),
                    Err(e) => return Err(RunFailure { records, error: Error::stage("postprocess")(e) }),
                }
            }
        }
        Ok(records)
    }

    pub fn run(&self, method: Method) -> Result<Vec<TimeSeriesRecord>, RunFailure> {
        self.run_observed(method, |_| {})
    }
}

/// Builds the model for `config` and runs `config.method`.
pub fn run_transient(config: &SimulationConfig) -> Result<Vec<TimeSeriesRecord>, RunFailure> {
    Model::build(config)?.run(config.method)
}
