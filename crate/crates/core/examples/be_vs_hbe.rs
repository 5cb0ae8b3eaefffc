//! Pennes and hyperbolic runs on the same model, compared: crossover times
//! of lesion volume and peak temperature, and the largest relative gap.
//! `cargo run --release --example be_vs_hbe -- [voltage] [ratio]`

use ablation_fem::bioheat::{Method, Model, SimulationConfig};
use ablation_fem::postprocess::compare_series;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>());
    let applied_voltage = args.next().transpose()?.unwrap_or(30.0);
    let convection_ratio = args.next().transpose()?.unwrap_or(1.0);
    let cfg = SimulationConfig { applied_voltage, convection_ratio, ..Default::default() };
    let model = Model::build(&cfg)?;
    let be = model.run(Method::Be)?;
    let hbe = model.run(Method::Hbe)?;
    let cmp = compare_series(&be, &hbe)?;

    println!("{applied_voltage} V, ratio {convection_ratio}");
    println!("  t_s   V_BE_mm3  V_HBE_mm3  Tmax_BE  Tmax_HBE");
    for i in (99..be.len()).step_by(100) {
        println!(
            "{:>5.0} {:>10.3} {:>10.3} {:>8.2} {:>9.2}",
            be[i].t,
            be[i].lesion.volume * 1e9,
            hbe[i].lesion.volume * 1e9,
            be[i].peak.value,
            hbe[i].peak.value
        );
    }
    let show = |t: Option<f64>| t.map_or("none".to_string(), |t| format!("{t:.2} s"));
    println!("lesion crossover      {}", show(cmp.lesion_crossover.time));
    println!("T_max crossover       {}", show(cmp.peak_crossover.time));
    if let Some((r, t)) = cmp.peak_ratio {
        println!("peak difference ratio {r:.3} at {t:.1} s");
    }
    Ok(())
}
