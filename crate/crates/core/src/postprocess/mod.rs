//! Lesion size, peak and probe temperatures, energy accounting, and the
//! BE/HBE comparison.

mod series;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fem::CoefficientMap;
use crate::mesh::{Mesh, Node, Region};

pub use series::{compare_series, crossover, ComparisonSeries, Crossover, RATIO_START, CROSSOVER_START};

/// Cross-section area (m²) and revolved volume (m³) of the super-threshold
/// part of the muscle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LesionMetrics {
    pub area: f64,
    pub volume: f64,
}

/// The part of triangle `p` where the linear interpolant of `f` is `>= 0`.
/// Returns the polygon's area and `∫ r dA`.
fn clip_moments(p: [Node; 3], f: [f64; 3]) -> (f64, f64) {
    if f.iter().all(|&v| v >= 0.0) {
        return polygon_moments(&p);
    }
    if f.iter().all(|&v| v < 0.0) {
        return (0.0, 0.0);
    }
    let mut poly: Vec<Node> = Vec::with_capacity(4);
    for i in 0..3 {
        let j = (i + 1) % 3;
        if f[i] >= 0.0 {
            poly.push(p[i]);
        }
        if (f[i] >= 0.0) != (f[j] >= 0.0) {
            let s = f[i] / (f[i] - f[j]);
            poly.push(Node::new(p[i].r + s * (p[j].r - p[i].r), p[i].z + s * (p[j].z - p[i].z)));
        }
    }
    polygon_moments(&poly)
}

/// Fan-triangulated area and first radial moment of a convex polygon.
fn polygon_moments(poly: &[Node]) -> (f64, f64) {
    let (mut area, mut moment) = (0.0, 0.0);
    for k in 1..poly.len().saturating_sub(1) {
        let a = crate::mesh::signed_area(poly[0], poly[k], poly[k + 1]);
        area += a;
        moment += a * (poly[0].r + poly[k].r + poly[k + 1].r) / 3.0;
    }
    (area, moment)
}

/// Exact clip of the piecewise-linear field against `threshold`, muscle only.
pub fn lesion_metrics(mesh: &Mesh, temperature: &[f64], threshold: f64) -> LesionMetrics {
    let mut out = LesionMetrics::default();
    for (e, t) in mesh.triangles.iter().enumerate() {
        if t.region != Region::Muscle {
            continue;
        }
        let f = t.nodes.map(|v| temperature[v] - threshold);
        let (a, m) = clip_moments(mesh.vertices(e), f);
        out.area += a;
        out.volume += 2.0 * PI * m;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakTemperature {
    pub value: f64,
    pub node: usize,
    pub location: Node,
}

/// Nodal maximum; ties go to the lowest node index.
pub fn max_temperature(mesh: &Mesh, temperature: &[f64]) -> PeakTemperature {
    let mut node = 0;
    for (i, &v) in temperature.iter().enumerate() {
        if v > temperature[node] {
            node = i;
        }
    }
    PeakTemperature { value: temperature[node], node, location: mesh.nodes[node] }
}

/// Linear interpolation at `point`.
pub fn probe(mesh: &Mesh, temperature: &[f64], point: Node) -> Result<f64> {
    let (e, bary) = mesh.locate(point).ok_or(Error::OutsideDomain { r: point.r, z: point.z })?;
    let n = mesh.triangles[e].nodes;
    Ok(bary[0] * temperature[n[0]] + bary[1] * temperature[n[1]] + bary[2] * temperature[n[2]])
}

/// Stored heat `∫ ρc (T − reference) 2πr dA` per region, indexed by [`Region::index`].
pub fn region_energy(mesh: &Mesh, temperature: &[f64], heat_capacity: &CoefficientMap, reference: f64) -> [f64; 3] {
    let mut e_out = [0.0; 3];
    for (e, t) in mesh.triangles.iter().enumerate() {
        let p = mesh.vertices(e);
        let rs = p[0].r + p[1].r + p[2].r;
        // ∫ φ_i r dA = A (rs + r_i) / 12
        let integral: f64 = (0..3).map(|i| (temperature[t.nodes[i]] - reference) * (rs + p[i].r)).sum::<f64>()
            * mesh.signed_area(e)
            / 12.0;
        e_out[t.region.index()] += heat_capacity.get(t.region) * 2.0 * PI * integral;
    }
    e_out
}

/// Everything reported at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub lesion: LesionMetrics,
    pub peak: PeakTemperature,
    /// One per configured probe depth.
    pub probes: Vec<f64>,
    /// Stored heat relative to the initial temperature, J, per region.
    pub stored_energy: [f64; 3],
    /// Cumulative Joule heat deposited, J, per region.
    pub joule_energy: [f64; 3],
}
