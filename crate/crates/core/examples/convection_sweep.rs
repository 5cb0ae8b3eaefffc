//! The convection-ratio group at 30 V: BE and HBE at each ratio, summary
//! table on stdout. `cargo run --release --example convection_sweep -- [out_dir]`

use ablation_fem::experiment::{run_sweep, SweepGroup, SweepOptions, SweepSpec};

fn main() -> ablation_fem::Result<()> {
    let out = std::env::args().nth(1).map(Into::into);
    let plots = out.is_some();
    let outcome = run_sweep(&SweepSpec::standard(SweepGroup::Convection), &SweepOptions { jobs: 0, out, plots })?;
    print!("{}", outcome.summary_csv());
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}
