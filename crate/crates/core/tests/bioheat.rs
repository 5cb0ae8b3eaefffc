use std::sync::OnceLock;

use ablation_fem::bioheat::{Method, Model, SimulationConfig, StepControl, Stepper, ThermalOperators};
use ablation_fem::experiment::validate::{energy_balance, fem_front_speed, parabolic_slab_error, tau_zero_equivalence};
use ablation_fem::fem::CoefficientMap;
use ablation_fem::mesh::{rectangle, BoundaryTag, RectangleSpec, Region};
use ablation_fem::postprocess::{compare_series, TimeSeriesRecord};

struct Runs {
    model: Model,
    be: Vec<TimeSeriesRecord>,
    hbe: Vec<TimeSeriesRecord>,
    t_min: f64,
}

fn runs() -> &'static Runs {
    static RUNS: OnceLock<Runs> = OnceLock::new();
    RUNS.get_or_init(|| {
        let model = Model::build(&SimulationConfig::default()).unwrap();
        let mut t_min = f64::INFINITY;
        let mut low = |s: &ablation_fem::bioheat::ThermalState| {
            t_min = s.temperature.iter().copied().fold(t_min, f64::min);
        };
        let be = model.run_observed(Method::Be, &mut low).unwrap();
        let hbe = model.run_observed(Method::Hbe, &mut low).unwrap();
        Runs { model, be, hbe, t_min }
    })
}

fn at(records: &[TimeSeriesRecord], t: f64) -> &TimeSeriesRecord {
    records.iter().find(|r| (r.t - t).abs() < 1e-9).unwrap()
}

#[test]
fn without_voltage_nothing_happens() {
    let cfg = SimulationConfig { applied_voltage: 0.0, t_end: 20.0, ..Default::default() };
    let model = Model::build(&cfg).unwrap();
    for method in [Method::Be, Method::Hbe] {
        for r in model.run(method).unwrap() {
            assert!((r.peak.value - 37.0).abs() < 1e-12, "{method} {}", r.peak.value);
            assert_eq!(r.lesion.volume, 0.0);
        }
    }
}

#[test]
fn resting_block_stays_at_rest() {
    let spec = RectangleSpec::new((0.0, 2e-3), (0.0, 2e-3), 4, 4).sides([
        Some(BoundaryTag::Axis),
        Some(BoundaryTag::OuterGroundAndThermal),
        Some(BoundaryTag::OuterGroundAndThermal),
        None,
    ]);
    let mesh = rectangle(&spec).unwrap();
    let outer = mesh.nodes_with_tag(BoundaryTag::OuterGroundAndThermal);
    let ops = ThermalOperators::new(mesh, CoefficientMap::uniform(3.84e6).unwrap(), CoefficientMap::uniform(0.55).unwrap(), false)
        .unwrap()
        .with_relaxation(&[Region::Muscle], false)
        .unwrap()
        .with_reference(37.0)
        .with_dirichlet(outer, 37.0);
    for method in [Method::Be, Method::Hbe] {
        let stepper = Stepper::new(&ops, method, StepControl::new(0.1).tau(16.0)).unwrap();
        let mut s = stepper.initial_state(37.0);
        for _ in 0..5 {
            s = stepper.step(&s).unwrap();
            assert!(s.temperature.iter().all(|&t| t == 37.0), "{method}");
        }
    }
}

#[test]
fn insulated_block_warms_at_the_source_rate() {
    let mesh = rectangle(&RectangleSpec::new((0.0, 2e-3), (0.0, 2e-3), 4, 4)).unwrap();
    let (rc, q, dt) = (3.6e6, 1e7, 0.1);
    let ops = ThermalOperators::new(mesh.clone(), CoefficientMap::uniform(rc).unwrap(), CoefficientMap::uniform(0.5).unwrap(), false)
        .unwrap()
        .with_source(&vec![q; mesh.triangle_count()])
        .unwrap();
    for method in [Method::Be, Method::Hbe] {
        let ops = if method == Method::Hbe { ops.clone().with_relaxation(&[Region::Muscle], false).unwrap() } else { ops.clone() };
        let stepper = Stepper::new(&ops, method, StepControl::new(dt).tau(16.0)).unwrap();
        let mut s = stepper.initial_state(37.0);
        for _ in 0..10 {
            s = stepper.step(&s).unwrap();
        }
        let rise = s.temperature.iter().sum::<f64>() / s.temperature.len() as f64 - 37.0;
        if method == Method::Be {
            assert!((rise - 10.0 * q * dt / rc).abs() < 1e-9, "{rise}");
        } else {
            // relaxed heating lags the source but never exceeds it
            assert!(rise > 0.0 && rise < 10.0 * q * dt / rc, "{rise}");
        }
        let spread = s.temperature.iter().fold(0.0f64, |m, t| m.max((t - 37.0 - rise).abs()));
        assert!(spread < 1e-9);
    }
}

#[test]
fn column_matches_the_parabolic_series() {
    let e = parabolic_slab_error(SimulationConfig::default().materials.muscle).unwrap();
    assert!(e < 0.01, "{e}");
}

#[test]
fn relaxed_front_moves_at_the_wave_speed() {
    let m = SimulationConfig::default().materials;
    let speed = fem_front_speed(&m).unwrap();
    let theory = m.muscle_wave_speed();
    assert!((speed - theory).abs() / theory < 0.05, "{speed} vs {theory}");
}

#[test]
fn zero_relaxation_reproduces_pennes() {
    let gap = tau_zero_equivalence(&SimulationConfig::default(), 10.0).unwrap();
    assert!(gap < 1e-9, "{gap}");
}

#[test]
fn tiny_relaxation_is_continuous() {
    let mut cfg = SimulationConfig { t_end: 30.0, ..Default::default() };
    cfg.materials.tau_muscle = 1e-6;
    let model = Model::build(&cfg).unwrap();
    let be = model.run(Method::Be).unwrap();
    let hbe = model.run(Method::Hbe).unwrap();
    for (a, b) in be.iter().zip(&hbe) {
        assert!((a.peak.value - b.peak.value).abs() < 1e-3, "t {}", a.t);
        assert!((a.lesion.volume - b.lesion.volume).abs() <= 1e-3 * a.lesion.volume.max(1e-12));
    }
}

#[test]
fn energy_is_conserved_per_step() {
    let e = energy_balance(&SimulationConfig::default(), 50).unwrap();
    assert!(e < 1e-9, "{e}");
}

#[test]
fn no_undershoot_below_blood_temperature() {
    assert!(runs().t_min >= 36.95, "{}", runs().t_min);
}

#[test]
fn relaxed_lesion_starts_smaller_then_overtakes() {
    let r = runs();
    assert!(at(&r.hbe, 10.0).lesion.volume < at(&r.be, 10.0).lesion.volume);
    assert!(at(&r.hbe, 60.0).lesion.volume > at(&r.be, 60.0).lesion.volume);
    let c = compare_series(&r.be, &r.hbe).unwrap();
    assert_eq!(c.lesion_crossover.count, 1);
    assert_eq!(c.peak_crossover.count, 1);
    let t = c.peak_crossover.time.unwrap();
    assert!(t > 5.0 && t < 45.0, "{t}");
}

#[test]
fn thermal_profile_shape() {
    let r = runs();
    let g = &r.model.config.geometry;
    for records in [&r.be, &r.hbe] {
        let last = records.last().unwrap();
        assert!(last.t == 120.0);
        assert!(last.peak.location.z < g.tip_apex(), "peak at z {}", last.peak.location.z);
        assert!(last.probes.iter().all(|&p| p <= last.peak.value));
        let hottest = (0..last.probes.len()).max_by(|&a, &b| last.probes[a].total_cmp(&last.probes[b])).unwrap();
        assert!((r.model.config.probe_depths[hottest] - 2.6e-3).abs() < 1e-12);
    }
    let near: Vec<f64> = r.be.iter().filter(|x| x.t >= 20.0).map(|x| x.probes[0]).collect();
    let (lo, hi) = near.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi - lo < 3.0, "{lo}..{hi}");
}

#[test]
fn halving_the_step_changes_the_lesion_little() {
    let coarse = at(&runs().be, 120.0).lesion.volume;
    let cfg = SimulationConfig { dt: 0.05, ..Default::default() };
    let fine = Model::build(&cfg).unwrap().run(Method::Be).unwrap().last().unwrap().lesion.volume;
    assert!((fine - coarse).abs() / fine < 0.01, "{coarse} vs {fine}");
}

#[test]
fn reruns_are_identical() {
    let cfg = SimulationConfig { t_end: 15.0, ..Default::default() };
    let a = Model::build(&cfg).unwrap().run(Method::Hbe).unwrap();
    let b = Model::build(&cfg).unwrap().run(Method::Hbe).unwrap();
    assert_eq!(a, b);
}

#[test]
fn without_blood_cooling_muscle_keeps_its_heat() {
    let cfg = SimulationConfig { convection_ratio: 0.0, t_end: 30.0, ..Default::default() };
    let last = Model::build(&cfg).unwrap().run(Method::Be).unwrap().pop().unwrap();
    let stored = last.stored_energy[Region::Muscle.index()] + last.stored_energy[Region::Electrode.index()];
    let input = last.joule_energy[Region::Muscle.index()];
    assert!((stored - input).abs() / input < 0.01, "stored {stored} J, deposited {input} J");
}
