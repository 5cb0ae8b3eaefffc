//! Chart sets for single runs and sweeps, one file name per chart.

use super::svg::{LineChart, Series};
use crate::bioheat::Method;
use crate::mesh::Region;
use crate::postprocess::TimeSeriesRecord;

fn curve(records: &[TimeSeriesRecord], f: impl Fn(&TimeSeriesRecord) -> f64) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.t, f(r))).collect()
}

fn volume_mm3(r: &TimeSeriesRecord) -> f64 {
    r.lesion.volume * 1e9
}

pub fn run_charts(method: Method, records: &[TimeSeriesRecord], probe_depths: &[f64]) -> Vec<(&'static str, LineChart)> {
    let mut lesion = LineChart::new(format!("Lesion volume ({method})"), "t (s)", "volume (mm³)");
    lesion.push(Series::new(method.name(), curve(records, volume_mm3)));

    let mut peak = LineChart::new(format!("Maximum temperature ({method})"), "t (s)", "T (°C)");
    peak.push(Series::new(method.name(), curve(records, |r| r.peak.value)));

    let mut probes = LineChart::new(format!("Axial probes ({method})"), "t (s)", "T (°C)");
    for (k, d) in probe_depths.iter().enumerate() {
        probes.push(
            Series::new(format!("{:.1} mm", d * 1e3), curve(records, |r| r.probes.get(k).copied().unwrap_or(f64::NAN)))
                .color(k),
        );
    }

    let mut energy = LineChart::new(format!("Energy ({method})"), "t (s)", "E (J)");
    for (k, region) in [Region::Muscle, Region::Blood].into_iter().enumerate() {
        energy.push(
            Series::new(format!("Joule {}", region.name()), curve(records, |r| r.joule_energy[region.index()]))
                .color(k),
        );
        energy.push(
            Series::new(format!("stored {}", region.name()), curve(records, |r| r.stored_energy[region.index()]))
                .color(k)
                .dashed(true),
        );
    }
    vec![("lesion", lesion), ("tmax", peak), ("probes", probes), ("energy", energy)]
}

/// One labelled BE/HBE pair per sweep point.
pub struct PointCurves<'a> {
    pub label: String,
    pub be: &'a [TimeSeriesRecord],
    pub hbe: &'a [TimeSeriesRecord],
    pub ratio: Vec<(f64, f64)>,
}

pub fn sweep_charts(group: &str, points: &[PointCurves<'_>]) -> Vec<(&'static str, LineChart)> {
    let mut lesion = LineChart::new(format!("Lesion volume, {group} sweep (BE solid, HBE dashed)"), "t (s)", "volume (mm³)");
    let mut peak = LineChart::new(format!("Maximum temperature, {group} sweep"), "t (s)", "T (°C)");
    let mut ratio = LineChart::new(format!("Lesion volume difference ratio, {group} sweep"), "t (s)", "|V_BE − V_HBE| / V_BE");
    let mut energy = LineChart::new(format!("Cumulative Joule energy, {group} sweep (blood solid, muscle dashed)"), "t (s)", "E (J)");
    for (k, p) in points.iter().enumerate() {
        lesion.push(Series::new(format!("{} BE", p.label), curve(p.be, volume_mm3)).color(k));
        lesion.push(Series::new(format!("{} HBE", p.label), curve(p.hbe, volume_mm3)).color(k).dashed(true));
        peak.push(Series::new(format!("{} BE", p.label), curve(p.be, |r| r.peak.value)).color(k));
        peak.push(Series::new(format!("{} HBE", p.label), curve(p.hbe, |r| r.peak.value)).color(k).dashed(true));
        ratio.push(Series::new(p.label.clone(), p.ratio.clone()).color(k));
        let joule = |region: Region| curve(p.be, move |r| r.joule_energy[region.index()]);
        energy.push(Series::new(format!("{} blood", p.label), joule(Region::Blood)).color(k));
        energy.push(Series::new(format!("{} muscle", p.label), joule(Region::Muscle)).color(k).dashed(true));
    }
    vec![("lesion", lesion), ("tmax", peak), ("diff_ratio", ratio), ("energy", energy)]
}
