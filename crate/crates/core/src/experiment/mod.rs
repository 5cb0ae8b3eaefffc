//! Configuration files, CSV and SVG output, parameter sweeps and the
//! validation suite behind the `ablation` command.

mod config;
mod output;
pub mod plots;
mod run;
pub mod svg;
mod sweep;
pub mod validate;

pub use config::{load_config, parse_config};
pub use output::{run_csv, run_row, summary_csv, SummaryRow, RUN_COLUMNS, SUMMARY_COLUMNS, TRUNCATION_MARKER};
pub use run::{execute_run, run_stem, RunOutput};
pub use sweep::{run_sweep, PointResult, SweepGroup, SweepOptions, SweepOutcome, SweepPoint, SweepSpec};
pub use validate::{run_validation, Bound, Check, ValidationReport};
