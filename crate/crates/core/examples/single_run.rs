//! One 120 s run of the default configuration (30 V, ratio 1.0).
//! `cargo run --release --example single_run -- [BE|HBE]`

use ablation_fem::bioheat::{run_transient, Method, SimulationConfig};

fn main() -> anyhow::Result<()> {
    let method = match std::env::args().nth(1).as_deref() {
        Some("HBE") | Some("hbe") => Method::Hbe,
        _ => Method::Be,
    };
    let cfg = SimulationConfig { method, ..Default::default() };
    let records = run_transient(&cfg)?;
    println!("{method}: t_s  lesion_mm3  T_max_C  (r, z)_mm  probes_C");
    for r in records.iter().filter(|r| (r.t.round() as i64) % 10 == 0 && (r.t - r.t.round()).abs() < 1e-6) {
        let probes: Vec<String> = r.probes.iter().map(|p| format!("{p:.2}")).collect();
        println!(
            "{:>5.0} {:>10.3} {:>8.2}  ({:.2}, {:.2})  {}",
            r.t,
            r.lesion.volume * 1e9,
            r.peak.value,
            r.peak.location.r * 1e3,
            r.peak.location.z * 1e3,
            probes.join(" ")
        );
    }
    Ok(())
}
