//! The full verification suite, as run by `ablation validate`.

use ablation_fem::bioheat::SimulationConfig;
use ablation_fem::experiment::run_validation;

fn main() {
    let report = run_validation(&SimulationConfig::default());
    println!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
}
