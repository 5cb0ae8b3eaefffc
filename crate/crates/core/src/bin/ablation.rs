use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use ablation_fem::bioheat::SimulationConfig;
use ablation_fem::experiment::{execute_run, load_config, run_sweep, run_validation, SweepGroup, SweepOptions, SweepSpec};
use ablation_fem::mesh::io::{write_atomic, write_mesh};
use ablation_fem::mesh::{build_geometry, mesh_quality, Region};

#[derive(Parser)]
#[command(name = "ablation", version, about = "RF cardiac ablation: Pennes vs hyperbolic bioheat")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Convection,
    Voltage,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its time series as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Also write SVG charts.
        #[arg(long)]
        plots: bool,
    },
    /// Run BE and HBE over the convection-ratio or voltage group.
    Sweep {
        #[arg(long, value_enum)]
        group: Group,
        /// Points run concurrently (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        plots: bool,
        /// Base configuration for every point.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the verification suite.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Build the default mesh.
    Mesh {
        /// Print size, quality and region volumes.
        #[arg(long)]
        info: bool,
        /// Write the mesh in the plain-text format.
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn base_config(path: Option<&PathBuf>) -> anyhow::Result<SimulationConfig> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(SimulationConfig::default()),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { config, out, plots } => {
            let cfg = load_config(&config)?;
            let run = execute_run(&cfg, &out, plots)
                .with_context(|| format!("run failed; partial results in {}", out.display()))?;
            let last = run.records.last().context("run produced no records")?;
            println!("wrote {} ({} rows)", run.csv.display(), run.records.len());
            for p in &run.files {
                println!("wrote {}", p.display());
            }
            println!(
                "t = {} s: lesion {:.3} mm³, T_max {:.2} °C",
                last.t,
                last.lesion.volume * 1e9,
                last.peak.value
            );
        }
        Command::Sweep { group, jobs, out, plots, config } => {
            let group = match group {
                Group::Convection => SweepGroup::Convection,
                Group::Voltage => SweepGroup::Voltage,
            };
            let spec = SweepSpec::standard(group).with_base(base_config(config.as_ref())?);
            let outcome = run_sweep(&spec, &SweepOptions { jobs, out: Some(out), plots })?;
            print!("{}", outcome.summary_csv());
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            if outcome.failed() > 0 {
                eprintln!("{} of {} points failed", outcome.failed(), outcome.points.len());
                return Ok(ExitCode::from(2));
            }
        }
        Command::Validate { config } => {
            let report = run_validation(&base_config(config.as_ref())?);
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Mesh { info, export, config } => {
            if !info && export.is_none() {
                bail!("nothing to do: pass --info and/or --export PATH");
            }
            let cfg = base_config(config.as_ref())?;
            let mesh = build_geometry(&cfg.geometry, cfg.target_edge_length)?;
            if info {
                let q = mesh_quality(&mesh);
                println!("nodes      {}", q.node_count);
                println!("triangles  {}", q.triangle_count);
                println!("min angle  {:.2} deg", q.min_angle_deg);
                println!("max aspect {:.3}", q.max_aspect_ratio);
                for r in Region::ALL {
                    println!("{:<10} {:.4} mm³", r.name(), q.volume(r) * 1e9);
                }
            }
            if let Some(path) = export {
                write_atomic(&path, write_mesh(&mesh).as_bytes())?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
