use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{num, run_csv, summary_csv, SummaryRow};
use super::plots::{sweep_charts, PointCurves};
use crate::bioheat::{Method, Model, RunFailure, SimulationConfig};
use crate::error::{Error, Result};
use crate::mesh::io::write_atomic;
use crate::mesh::{build_geometry, Mesh};
use crate::postprocess::{compare_series, ComparisonSeries, TimeSeriesRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepGroup {
    /// Convection ratio varied at fixed voltage.
    Convection,
    /// Voltage varied at fixed convection ratio.
    Voltage,
}

impl SweepGroup {
    pub fn name(self) -> &'static str {
        match self {
            SweepGroup::Convection => "convection",
            SweepGroup::Voltage => "voltage",
        }
    }
}

impl FromStr for SweepGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convection" => Ok(SweepGroup::Convection),
            "voltage" => Ok(SweepGroup::Voltage),
            _ => Err(Error::InvalidParameter(format!("unknown sweep group `{s}` (convection or voltage)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub group: SweepGroup,
    pub ratios: Vec<f64>,
    pub voltages: Vec<f64>,
    /// Voltage held while the ratio varies.
    pub fixed_voltage: f64,
    /// Ratio held while the voltage varies.
    pub fixed_ratio: f64,
    /// Everything else.
    pub base: SimulationConfig,
}

impl SweepSpec {
    pub fn standard(group: SweepGroup) -> Self {
        SweepSpec {
            group,
            ratios: vec![0.0, 0.1, 0.25, 0.5, 1.0, 1.5],
            voltages: vec![25.0, 30.0, 35.0, 40.0],
            fixed_voltage: 30.0,
            fixed_ratio: 1.0,
            base: SimulationConfig::default(),
        }
    }

    pub fn with_base(mut self, base: SimulationConfig) -> Self {
        self.base = base;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let values = match self.group {
            SweepGroup::Convection => &self.ratios,
            SweepGroup::Voltage => &self.voltages,
        };
        if values.is_empty() {
            return Err(Error::InvalidParameter(format!("{} sweep has no values", self.group.name())));
        }
        let all = self.ratios.iter().chain(&self.voltages).chain([&self.fixed_voltage, &self.fixed_ratio]);
        if let Some(v) = all.into_iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("sweep values must be >= 0, got {v}")));
        }
        self.base.validate()
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        match self.group {
            SweepGroup::Convection => {
                self.ratios.iter().map(|&ratio| SweepPoint { voltage: self.fixed_voltage, ratio }).collect()
            }
            SweepGroup::Voltage => {
                self.voltages.iter().map(|&voltage| SweepPoint { voltage, ratio: self.fixed_ratio }).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub voltage: f64,
    pub ratio: f64,
}

impl SweepPoint {
    pub fn config(&self, base: &SimulationConfig, method: Method) -> SimulationConfig {
        SimulationConfig { method, applied_voltage: self.voltage, convection_ratio: self.ratio, ..base.clone() }
    }

    pub fn label(&self, group: SweepGroup) -> String {
        match group {
            SweepGroup::Convection => format!("ratio {}", self.ratio),
            SweepGroup::Voltage => format!("{} V", self.voltage),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub point: SweepPoint,
    pub be: Vec<TimeSeriesRecord>,
    pub hbe: Vec<TimeSeriesRecord>,
    /// Present when both runs completed.
    pub comparison: Option<ComparisonSeries>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub group: SweepGroup,
    pub points: Vec<PointResult>,
    pub files: Vec<PathBuf>,
}

impl SweepOutcome {
    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.points
            .iter()
            .map(|p| SummaryRow {
                group: self.group.name().into(),
                voltage: p.point.voltage,
                ratio: p.point.ratio,
                comparison: p.comparison.clone(),
                final_peak: p.comparison.as_ref().and_then(|_| Some((p.be.last()?.peak.value, p.hbe.last()?.peak.value))),
                error: p.error.clone(),
            })
            .collect()
    }

    pub fn summary_csv(&self) -> String {
        summary_csv(&self.summary_rows())
    }

    pub fn failed(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Points run at once; 0 means one per core.
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub plots: bool,
}

fn point_stem(group: SweepGroup, p: &SweepPoint, method: Method) -> String {
    format!("{}_V{}_r{}_{}", group.name(), num(p.voltage), num(p.ratio), method)
}

fn run_point(spec: &SweepSpec, mesh: &Mesh, point: SweepPoint, out: Option<&Path>) -> PointResult {
    let mut errors = Vec::new();
    let mut runs: [Vec<TimeSeriesRecord>; 2] = [Vec::new(), Vec::new()];
    let model = Model::with_mesh(&point.config(&spec.base, Method::Be), mesh.clone());
    for (slot, method) in runs.iter_mut().zip([Method::Be, Method::Hbe]) {
        let cfg = point.config(&spec.base, method);
        let result = match &model {
            Ok(m) => m.run(method),
            Err(e) => Err(RunFailure { records: Vec::new(), error: Error::InvalidParameter(e.to_string()) }),
        };
        let failure = match result {
            Ok(records) => {
                *slot = records;
                None
            }
            Err(RunFailure { records, error }) => {
                *slot = records;
                errors.push(format!("{method}: {error}"));
                Some(error.to_string())
            }
        };
        if let Some(dir) = out {
            let path = dir.join(format!("{}.csv", point_stem(spec.group, &point, method)));
            let text = run_csv(&cfg, method, slot, failure.as_deref());
            if let Err(e) = write_atomic(&path, text.as_bytes()) {
                errors.push(format!("writing {}: {e}", path.display()));
            }
        }
    }
    let [be, hbe] = runs;
    let comparison = if errors.is_empty() {
        match compare_series(&be, &hbe) {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        }
    } else {
        None
    };
    let error = (!errors.is_empty()).then(|| errors.join("; "));
    PointResult { point, be, hbe, comparison, error }
}

/// Runs BE and HBE at every point of `spec` and compares them. A failing
/// point is recorded in its [`PointResult`] and the sweep carries on.
pub fn run_sweep(spec: &SweepSpec, opts: &SweepOptions) -> Result<SweepOutcome> {
    spec.validate()?;
    let base = &spec.base;
    let mesh = build_geometry(&base.geometry, base.target_edge_length).map_err(Error::stage("mesh"))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let out = opts.out.as_deref();
    let points: Vec<PointResult> =
        pool.install(|| spec.points().into_par_iter().map(|p| run_point(spec, &mesh, p, out)).collect());

    let mut files = Vec::new();
    if let Some(dir) = out {
        for p in &points {
            for m in [Method::Be, Method::Hbe] {
                files.push(dir.join(format!("{}.csv", point_stem(spec.group, &p.point, m))));
            }
        }
    }
    let mut outcome = SweepOutcome { group: spec.group, points, files };
    if let Some(dir) = out {
        let path = dir.join(format!("summary_{}.csv", spec.group.name()));
        write_atomic(&path, outcome.summary_csv().as_bytes())?;
        outcome.files.push(path);
        if opts.plots {
            let curves: Vec<PointCurves<'_>> = outcome
                .points
                .iter()
                .map(|p| PointCurves {
                    label: p.point.label(spec.group),
                    be: &p.be,
                    hbe: &p.hbe,
                    ratio: p
                        .comparison
                        .as_ref()
                        .map(|c| c.times.iter().zip(&c.ratio).map(|(&t, r)| (t, r.unwrap_or(f64::NAN))).collect())
                        .unwrap_or_default(),
                })
                .collect();
            let mut written = Vec::new();
            for (name, chart) in sweep_charts(spec.group.name(), &curves) {
                let path = dir.join(format!("{}_{name}.svg", spec.group.name()));
                write_atomic(&path, chart.render().as_bytes())?;
                written.push(path);
            }
            outcome.files.extend(written);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_points() {
        let c = SweepSpec::standard(SweepGroup::Convection).points();
        assert_eq!(c.len(), 6);
        assert!(c.iter().all(|p| p.voltage == 30.0));
        let v = SweepSpec::standard(SweepGroup::Voltage).points();
        assert_eq!(v.iter().map(|p| p.voltage).collect::<Vec<_>>(), vec![25.0, 30.0, 35.0, 40.0]);
        assert!(v.iter().all(|p| p.ratio == 1.0));
    }

    #[test]
    fn rejects_empty_and_negative_values() {
        let mut s = SweepSpec::standard(SweepGroup::Voltage);
        s.voltages.clear();
        assert!(s.validate().is_err());
        let mut s = SweepSpec::standard(SweepGroup::Convection);
        s.ratios.push(-0.5);
        assert!(s.validate().is_err());
        assert!("heat".parse::<SweepGroup>().is_err());
        assert_eq!("voltage".parse::<SweepGroup>().unwrap(), SweepGroup::Voltage);
    }
}
