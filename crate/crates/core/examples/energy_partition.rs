//! Where the RF energy goes: cumulative Joule heat and stored heat per
//! region, and the per-step discrete energy balance of both methods.

use ablation_fem::bioheat::{Method, Model, SimulationConfig};
use ablation_fem::mesh::Region;

fn main() -> anyhow::Result<()> {
    let cfg = SimulationConfig::default();
    let model = Model::build(&cfg)?;
    let p = model.region_power;
    let total: f64 = p.iter().sum();
    println!("Joule power: muscle {:.3} W, blood {:.3} W ({:.1} % in blood)", p[1], p[2], 100.0 * p[2] / total);

    for method in [Method::Be, Method::Hbe] {
        let stepper = model.stepper(method)?;
        let mut state = stepper.initial_state(cfg.t_initial);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.steps() {
            let next = stepper.step(&state)?;
            worst = worst.max(stepper.energy_balance(&state, &next)?.relative_error());
            state = next;
        }
        let last = model.record(&state, p.map(|w| w * cfg.t_end))?;
        println!("{method} at {} s (worst step residual {worst:.2e}):", cfg.t_end);
        for r in [Region::Muscle, Region::Blood, Region::Electrode] {
            println!(
                "  {:<9} Joule {:>8.2} J  stored {:>8.2} J",
                r.name(),
                last.joule_energy[r.index()],
                last.stored_energy[r.index()]
            );
        }
    }
    Ok(())
}
