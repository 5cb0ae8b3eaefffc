use std::path::{Path, PathBuf};

use super::output::{num, run_csv};
use super::plots::run_charts;
use crate::bioheat::{Model, RunFailure, SimulationConfig};
use crate::error::Result;
use crate::mesh::io::{write_atomic, write_field, write_mesh};
use crate::postprocess::TimeSeriesRecord;

/// File stem shared by every output of one run.
pub fn run_stem(config: &SimulationConfig) -> String {
    format!("run_{}_V{}_r{}", config.method, num(config.applied_voltage), num(config.convection_ratio))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TimeSeriesRecord>,
    pub csv: PathBuf,
    /// Charts, snapshot fields and the mesh they refer to.
    pub files: Vec<PathBuf>,
}

fn write_plots(config: &SimulationConfig, records: &[TimeSeriesRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let stem = run_stem(config);
    let mut files = Vec::new();
    for (name, chart) in run_charts(config.method, records, &config.probe_depths) {
        let path = dir.join(format!("{stem}_{name}.svg"));
        write_atomic(&path, chart.render().as_bytes())?;
        files.push(path);
    }
    Ok(files)
}

/// Mesh, potential, per-element Joule source and the requested
/// temperature snapshots, all indexed like the mesh file.
fn write_fields(model: &Model, snapshots: &[(f64, Vec<f64>)], dir: &Path) -> Result<Vec<PathBuf>> {
    let stem = run_stem(&model.config);
    let mut out = vec![
        (dir.join(format!("{stem}_mesh.txt")), write_mesh(&model.mesh)),
        (dir.join(format!("{stem}_potential.txt")), write_field(&model.potential.values)),
        (dir.join(format!("{stem}_joule.txt")), write_field(&model.source.per_element)),
    ];
    for (t, values) in snapshots {
        out.push((dir.join(format!("{stem}_T_{}s.txt", num(*t))), write_field(values)));
    }
    for (path, text) in &out {
        write_atomic(path, text.as_bytes())?;
    }
    Ok(out.into_iter().map(|(p, _)| p).collect())
}

/// Runs `config` and writes `<out>/<stem>.csv`, charts with `plots`, and
/// field files when `config.snapshot_times` is non-empty.
///
/// A failed run still writes the records it produced, followed by a
/// truncation marker row, before the error is returned.
pub fn execute_run(config: &SimulationConfig, out: &Path, plots: bool) -> Result<RunOutput> {
    let csv = out.join(format!("{}.csv", run_stem(config)));
    let model = match Model::build(config) {
        Ok(m) => m,
        Err(error) => {
            write_atomic(&csv, run_csv(config, config.method, &[], Some(&error.to_string())).as_bytes())?;
            return Err(error);
        }
    };
    let half = 0.5 * config.dt;
    let mut snapshots: Vec<(f64, Vec<f64>)> = Vec::new();
    let result = model.run_observed(config.method, |state| {
        if let Some(&t) = config.snapshot_times.iter().find(|&&t| (state.t - t).abs() < half) {
            snapshots.push((t, model.parent_temperature(state)));
        }
    });
    match result {
        Ok(records) => {
            write_atomic(&csv, run_csv(config, config.method, &records, None).as_bytes())?;
            let mut files = if plots { write_plots(config, &records, out)? } else { Vec::new() };
            if !config.snapshot_times.is_empty() {
                files.extend(write_fields(&model, &snapshots, out)?);
            }
            Ok(RunOutput { records, csv, files })
        }
        Err(RunFailure { records, error }) => {
            let text = run_csv(config, config.method, &records, Some(&error.to_string()));
            write_atomic(&csv, text.as_bytes())?;
            Err(error)
        }
    }
}
