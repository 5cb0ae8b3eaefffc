//! Independent reference solutions: the Fourier series for a heated slab,
//! the explicit relaxed scheme and its finite front speed, and a
//! manufactured solution for the axisymmetric FEM.

use ablation_fem::bioheat::MaterialTable;
use ablation_fem::experiment::validate::{fem_front_speed, manufactured_errors, oracle_front_speed};
use ablation_fem::oracles::{oracle_be_1d, oracle_hbe_1d, Oracle1DConfig};

fn main() -> ablation_fem::Result<()> {
    let materials = MaterialTable::default();
    let base = Oracle1DConfig {
        length: 8e-3,
        material: materials.muscle,
        tau: 0.0,
        t_initial: 37.0,
        bump: 0.0,
        t_left: 60.0,
        t_right: 37.0,
        source: 0.0,
        cells: 16,
        dt: 0.0,
    };
    let times = [5.0, 30.0, 120.0];
    let fourier = oracle_be_1d(&base, &times)?;
    let mut relaxed = Oracle1DConfig { tau: materials.tau_muscle, cells: 800, ..base };
    relaxed.dt = relaxed.stable_dt() / 2.0;
    let hbe = oracle_hbe_1d(&relaxed, &times)?;
    println!("slab with a hot left end, T at x = 1, 2, 4 mm:");
    for (k, t) in times.iter().enumerate() {
        let at = |x: f64| format!("{:.3}/{:.3}", fourier.at(k, x), hbe.at(k, x));
        println!("  t = {t:>5} s  Fourier/relaxed  {}  {}  {}", at(1e-3), at(2e-3), at(4e-3));
    }

    let theory = materials.muscle_wave_speed();
    println!("thermal wave speed sqrt(k/(ρcτ)) = {theory:.4e} m/s");
    println!("  explicit oracle front {:.4e} m/s", oracle_front_speed(&materials)?);
    println!("  FEM column front      {:.4e} m/s", fem_front_speed(&materials)?);

    let grids = [4, 8, 16, 32];
    let errors = manufactured_errors(materials.muscle, &grids)?;
    println!("manufactured solution, Crank–Nicolson Fourier FEM:");
    for (i, (n, e)) in grids.iter().zip(&errors).enumerate() {
        let order = if i > 0 { format!("order {:.3}", (errors[i - 1] / e).log2()) } else { String::new() };
        println!("  {n:>2} x {n:<2} L2 error {e:.3e} {order}");
    }
    Ok(())
}
