use super::{Mesh, Region};

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub node_count: usize,
    pub triangle_count: usize,
    /// Smallest interior angle over all triangles, in degrees.
    pub min_angle_deg: f64,
    /// Largest ratio of longest edge to the smallest altitude-based length
    /// `2·√3·inradius`, which is 1 for an equilateral triangle.
    pub max_aspect_ratio: f64,
    /// Revolved volume per region, indexed by [`Region::index`].
    pub region_volumes: [f64; 3],
}

impl QualityReport {
    pub fn volume(&self, region: Region) -> f64 {
        self.region_volumes[region.index()]
    }

    pub fn total_volume(&self) -> f64 {
        self.region_volumes.iter().sum()
    }
}

pub fn mesh_quality(mesh: &Mesh) -> QualityReport {
    let mut min_angle = f64::INFINITY;
    let mut max_aspect: f64 = 0.0;
    let mut volumes = [0.0; 3];
    for (e, t) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = mesh.vertices(e);
        let la = b.distance(c);
        let lb = c.distance(a);
        let lc = a.distance(b);
        for (opp, s1, s2) in [(la, lb, lc), (lb, lc, la), (lc, la, lb)] {
            let cos = ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0);
            min_angle = min_angle.min(cos.acos().to_degrees());
        }
        let area = mesh.signed_area(e);
        let inradius = 2.0 * area / (la + lb + lc);
        let longest = la.max(lb).max(lc);
        max_aspect = max_aspect.max(longest / (2.0 * 3f64.sqrt() * inradius));
        volumes[t.region.index()] += mesh.revolved_volume(e);
    }
    QualityReport {
        node_count: mesh.node_count(),
        triangle_count: mesh.triangle_count(),
        min_angle_deg: min_angle,
        max_aspect_ratio: max_aspect,
        region_volumes: volumes,
    }
}
