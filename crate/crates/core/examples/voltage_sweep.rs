//! The voltage group at convection ratio 1.0, with the trend of crossover
//! time and final lesion volume against voltage.
//! `cargo run --release --example voltage_sweep -- [out_dir]`

use ablation_fem::experiment::{run_sweep, SweepGroup, SweepOptions, SweepSpec};

fn main() -> ablation_fem::Result<()> {
    let out = std::env::args().nth(1).map(Into::into);
    let plots = out.is_some();
    let outcome = run_sweep(&SweepSpec::standard(SweepGroup::Voltage), &SweepOptions { jobs: 0, out, plots })?;
    println!("voltage  crossover_s  V_BE(120 s)_mm3  T_max_BE(120 s)_C");
    for p in &outcome.points {
        let cross = p.comparison.as_ref().and_then(|c| c.crossover_time());
        let last = p.be.last();
        println!(
            "{:>7} {:>12} {:>16.3} {:>18.2}",
            p.point.voltage,
            cross.map_or("none".into(), |t| format!("{t:.2}")),
            last.map_or(f64::NAN, |r| r.lesion.volume * 1e9),
            last.map_or(f64::NAN, |r| r.peak.value)
        );
    }
    Ok(())
}
