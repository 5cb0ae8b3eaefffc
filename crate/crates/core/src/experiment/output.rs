//! CSV tables. Column sets and order are fixed; readers should go by the
//! header names.

use std::fmt::Write as _;

use crate::bioheat::{Method, SimulationConfig};
use crate::mesh::Region;
use crate::postprocess::{ComparisonSeries, TimeSeriesRecord};

pub const RUN_COLUMNS: [&str; 17] = [
    "t_s",
    "method",
    "voltage_V",
    "conv_ratio",
    "lesion_area_mm2",
    "lesion_volume_mm3",
    "T_max_C",
    "r_max_mm",
    "z_max_mm",
    "T_probe_1p3_C",
    "T_probe_2p6_C",
    "T_probe_5p2_C",
    "E_stored_muscle_J",
    "E_stored_blood_J",
    "E_stored_electrode_J",
    "E_joule_muscle_J",
    "E_joule_blood_J",
];

pub const SUMMARY_COLUMNS: [&str; 10] = [
    "group",
    "voltage_V",
    "conv_ratio",
    "crossover_time_s",
    "peak_diff_ratio",
    "t_peak_diff_s",
    "lesion_volume_be_120s_mm3",
    "lesion_volume_hbe_120s_mm3",
    "T_max_be_120s_C",
    "T_max_hbe_120s_C",
];

/// Prefix of the row appended to a run cut short by a failure.
pub const TRUNCATION_MARKER: &str = "# TRUNCATED";

const MM: f64 = 1e3;
const MM2: f64 = 1e6;
const MM3: f64 = 1e9;

/// Shortest round-trip form, so equal runs give equal bytes.
pub(crate) fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn header(cols: &[&str]) -> String {
    let mut s = cols.join(",");
    s.push('\n');
    s
}

pub fn run_row(method: Method, voltage: f64, ratio: f64, r: &TimeSeriesRecord) -> String {
    let probe = |k: usize| r.probes.get(k).copied().map(num).unwrap_or_default();
    let stored = |g: Region| num(r.stored_energy[g.index()]);
    let joule = |g: Region| num(r.joule_energy[g.index()]);
    let cells = [
        num(r.t),
        method.name().to_string(),
        num(voltage),
        num(ratio),
        num(r.lesion.area * MM2),
        num(r.lesion.volume * MM3),
        num(r.peak.value),
        num(r.peak.location.r * MM),
        num(r.peak.location.z * MM),
        probe(0),
        probe(1),
        probe(2),
        stored(Region::Muscle),
        stored(Region::Blood),
        stored(Region::Electrode),
        joule(Region::Muscle),
        joule(Region::Blood),
    ];
    let mut s = cells.join(",");
    s.push('\n');
    s
}

/// Header plus one row per record. `failure` appends a marker row naming
/// the cause.
pub fn run_csv(config: &SimulationConfig, method: Method, records: &[TimeSeriesRecord], failure: Option<&str>) -> String {
    let mut s = header(&RUN_COLUMNS);
    for r in records {
        s.push_str(&run_row(method, config.applied_voltage, config.convection_ratio, r));
    }
    if let Some(msg) = failure {
        let t = records.last().map_or(0.0, |r| r.t);
        let _ = writeln!(s, "{TRUNCATION_MARKER} after t_s={}: {}", num(t), msg.replace(['\n', '\r'], " "));
    }
    s
}

/// One sweep point, BE and HBE on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group: String,
    pub voltage: f64,
    pub ratio: f64,
    pub comparison: Option<ComparisonSeries>,
    pub final_peak: Option<(f64, f64)>,
    /// Set when either run failed.
    pub error: Option<String>,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = header(&SUMMARY_COLUMNS);
    for row in rows {
        let c = row.comparison.as_ref();
        let last = |v: &Vec<f64>| v.last().map(|x| x * MM3);
        let cells = [
            row.group.clone(),
            num(row.voltage),
            num(row.ratio),
            opt(c.and_then(|c| c.crossover_time())),
            opt(c.and_then(|c| c.peak_ratio.map(|p| p.0))),
            opt(c.and_then(|c| c.peak_ratio.map(|p| p.1))),
            opt(c.and_then(|c| last(&c.volume_be))),
            opt(c.and_then(|c| last(&c.volume_hbe))),
            opt(row.final_peak.map(|p| p.0)),
            opt(row.final_peak.map(|p| p.1)),
        ];
        s.push_str(&cells.join(","));
        s.push('\n');
        if let Some(e) = &row.error {
            let _ = writeln!(s, "# FAILED {} V={} ratio={}: {}", row.group, num(row.voltage), num(row.ratio), e.replace(['\n', '\r'], " "));
        }
    }
    s
}
