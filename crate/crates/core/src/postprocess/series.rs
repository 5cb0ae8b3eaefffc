use super::TimeSeriesRecord;
use crate::error::{Error, Result};

/// Difference ratios are only reported from this time on (s); before it
/// the lesions are too small to compare.
pub const RATIO_START: f64 = 30.0;
/// Sign changes before this time (s) are ignored.
pub const CROSSOVER_START: f64 = 5.0;

/// Sign changes of `a − b` after a start time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Crossover {
    /// First sign change, linearly interpolated between samples.
    pub time: Option<f64>,
    pub count: usize,
    /// Sign of `a − b` before the first change (0 if never nonzero).
    pub initial_sign: i8,
}

fn sign(a: f64, b: f64) -> i8 {
    let d = a - b;
    if d.abs() <= 1e-9 * a.abs().max(b.abs()) {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// Sign changes of `a − b` for `t > after`. Samples where the two agree to
/// 1e-9 relative are treated as ties and skipped.
pub fn crossover(times: &[f64], a: &[f64], b: &[f64], after: f64) -> Crossover {
    let mut out = Crossover::default();
    let mut last: Option<(f64, f64, i8)> = None;
    for i in 0..times.len() {
        if times[i] <= after {
            continue;
        }
        let s = sign(a[i], b[i]);
        if s == 0 {
            continue;
        }
        let d = a[i] - b[i];
        match last {
            None => out.initial_sign = s,
            Some((t0, d0, s0)) if s0 != s => {
                out.count += 1;
                if out.time.is_none() {
                    out.time = Some(t0 + (times[i] - t0) * d0 / (d0 - d));
                }
            }
            _ => {}
        }
        last = Some((times[i], d, s));
    }
    out
}

/// Paired BE/HBE results on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSeries {
    pub times: Vec<f64>,
    pub volume_be: Vec<f64>,
    pub volume_hbe: Vec<f64>,
    /// `|V_BE − V_HBE| / V_BE` where `t >= RATIO_START` and `V_BE > 0`.
    pub ratio: Vec<Option<f64>>,
    /// Of `V_BE − V_HBE`.
    pub lesion_crossover: Crossover,
    /// Of `T_max,BE − T_max,HBE`.
    pub peak_crossover: Crossover,
    /// Largest ratio and its time.
    pub peak_ratio: Option<(f64, f64)>,
}

impl ComparisonSeries {
    pub fn crossover_time(&self) -> Option<f64> {
        self.lesion_crossover.time
    }
}

pub fn compare_series(be: &[TimeSeriesRecord], hbe: &[TimeSeriesRecord]) -> Result<ComparisonSeries> {
    if be.len() != hbe.len() {
        return Err(Error::MismatchedSeries(format!("{} vs {} records", be.len(), hbe.len())));
    }
    for (i, (a, b)) in be.iter().zip(hbe).enumerate() {
        if (a.t - b.t).abs() > 1e-9 * a.t.abs().max(1.0) {
            return Err(Error::MismatchedSeries(format!("record {i} at t = {} vs {}", a.t, b.t)));
        }
    }
    let times: Vec<f64> = be.iter().map(|r| r.t).collect();
    let volume_be: Vec<f64> = be.iter().map(|r| r.lesion.volume).collect();
    let volume_hbe: Vec<f64> = hbe.iter().map(|r| r.lesion.volume).collect();
    let ratio: Vec<Option<f64>> = (0..times.len())
        .map(|i| {
            (times[i] >= RATIO_START - 1e-9 && volume_be[i] > 0.0)
                .then(|| (volume_be[i] - volume_hbe[i]).abs() / volume_be[i])
        })
        .collect();
    let mut peak_ratio: Option<(f64, f64)> = None;
    for (i, r) in ratio.iter().enumerate() {
        if let Some(r) = *r {
            if peak_ratio.is_none_or(|(p, _)| r > p) {
                peak_ratio = Some((r, times[i]));
            }
        }
    }
    let tmax_be: Vec<f64> = be.iter().map(|r| r.peak.value).collect();
    let tmax_hbe: Vec<f64> = hbe.iter().map(|r| r.peak.value).collect();
    Ok(ComparisonSeries {
        lesion_crossover: crossover(&times, &volume_be, &volume_hbe, CROSSOVER_START),
        peak_crossover: crossover(&times, &tmax_be, &tmax_hbe, CROSSOVER_START),
        times,
        volume_be,
        volume_hbe,
        ratio,
        peak_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Node;
    use crate::postprocess::{LesionMetrics, PeakTemperature};

    fn records(volumes: &[f64]) -> Vec<TimeSeriesRecord> {
        volumes
            .iter()
            .enumerate()
            .map(|(i, &v)| TimeSeriesRecord {
                t: 10.0 * (i + 1) as f64,
                lesion: LesionMetrics { area: 0.0, volume: v },
                peak: PeakTemperature { value: 37.0 + v, node: 0, location: Node::new(0.0, 0.0) },
                probes: vec![],
                stored_energy: [0.0; 3],
                joule_energy: [0.0; 3],
            })
            .collect()
    }

    #[test]
    fn identical_series_have_zero_ratio_and_no_crossover() {
        let a = records(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let c = compare_series(&a, &a).unwrap();
        assert_eq!(c.crossover_time(), None);
        assert!(c.ratio.iter().flatten().all(|&r| r == 0.0));
        assert_eq!(c.ratio.iter().flatten().count(), 3);
    }

    #[test]
    fn double_series_gives_half_ratio() {
        let hbe = records(&[1.0, 2.0, 3.0, 4.0]);
        let be = records(&[2.0, 4.0, 6.0, 8.0]);
        let c = compare_series(&be, &hbe).unwrap();
        assert!(c.ratio.iter().flatten().all(|&r| r == 0.5));
        assert_eq!(c.peak_ratio, Some((0.5, 30.0)));
    }

    #[test]
    fn crossover_is_interpolated() {
        let be = records(&[2.0, 3.0, 4.0, 5.0]);
        let hbe = records(&[1.0, 2.0, 5.0, 7.0]);
        let c = compare_series(&be, &hbe).unwrap();
        // differences 1, 1, -1, -2: zero halfway between 20 and 30 s
        assert_eq!(c.crossover_time(), Some(25.0));
        assert_eq!(c.lesion_crossover.count, 1);
        assert_eq!(c.lesion_crossover.initial_sign, 1);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = records(&[1.0, 2.0]);
        let b = records(&[1.0]);
        assert!(matches!(compare_series(&a, &b), Err(Error::MismatchedSeries(_))));
    }
}
