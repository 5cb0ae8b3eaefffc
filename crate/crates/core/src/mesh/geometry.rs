//! The cylindrical ablation model and its graded triangulation.
//!
//! The r–z cross-section is a `tissue_radius × model_depth` rectangle: a
//! blood layer below the muscle slab, the slab itself, and a blood layer
//! above it. The electrode is a cylinder with a hemispherical tip on the
//! symmetry axis, entering the slab from the upper blood layer.

use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use super::{edge_key, signed_area, BoundaryEdge, BoundaryTag, CapArc, Mesh, Node, Region, Triangle};
use crate::error::{Error, Result};

/// Edge length at the electrode surface for the default mesh (≈ 2.9k nodes).
pub const DEFAULT_TARGET_EDGE_LENGTH: f64 = 1.0e-4;

/// Growth of the local edge length per metre of distance from the electrode.
const GRADING: f64 = 0.15;
/// Ceiling on the local edge length, as a multiple of the tissue thickness.
const MAX_EDGE_FRACTION: f64 = 0.3;
const MIN_ANGLE_DEG: f64 = 28.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelGeometry {
    pub electrode_length: f64,
    pub electrode_radius: f64,
    pub insertion_depth: f64,
    pub tissue_thickness: f64,
    pub tissue_radius: f64,
    pub blood_depth: f64,
    pub model_depth: f64,
}

impl Default for ModelGeometry {
    fn default() -> Self {
        ModelGeometry {
            electrode_length: 5.0e-3,
            electrode_radius: 1.3e-3,
            insertion_depth: 1.3e-3,
            tissue_thickness: 8.0e-3,
            tissue_radius: 20.0e-3,
            blood_depth: 32.0e-3,
            model_depth: 40.0e-3,
        }
    }
}

impl ModelGeometry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("electrode_length", self.electrode_length),
            ("electrode_radius", self.electrode_radius),
            ("insertion_depth", self.insertion_depth),
            ("tissue_thickness", self.tissue_thickness),
            ("tissue_radius", self.tissue_radius),
            ("blood_depth", self.blood_depth),
            ("model_depth", self.model_depth),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be strictly positive, got {v}")));
            }
        }
        let fail = |msg: String| Err(Error::Geometry(msg));
        if self.insertion_depth >= self.tissue_thickness {
            return fail(format!(
                "insertion_depth {} must be less than tissue_thickness {}",
                self.insertion_depth, self.tissue_thickness
            ));
        }
        if self.electrode_length <= self.insertion_depth {
            return fail(format!(
                "electrode_length {} must exceed insertion_depth {}",
                self.electrode_length, self.insertion_depth
            ));
        }
        let sum = self.tissue_thickness + self.blood_depth;
        if (sum - self.model_depth).abs() > 1e-9 * self.model_depth {
            return fail(format!(
                "tissue_thickness + blood_depth = {sum} must equal model_depth {}",
                self.model_depth
            ));
        }
        if self.electrode_radius >= self.tissue_radius {
            return fail(format!(
                "electrode_radius {} must be less than tissue_radius {}",
                self.electrode_radius, self.tissue_radius
            ));
        }
        // the hemispherical tip must be fully embedded below the muscle surface
        if self.insertion_depth < self.electrode_radius {
            return fail(format!(
                "insertion_depth {} must be at least electrode_radius {} so the hemispherical tip is embedded",
                self.insertion_depth, self.electrode_radius
            ));
        }
        if self.electrode_top() >= self.model_depth {
            return fail(format!(
                "electrode top {} reaches the model boundary {}",
                self.electrode_top(),
                self.model_depth
            ));
        }
        Ok(())
    }

    pub fn muscle_bottom(&self) -> f64 {
        0.5 * self.blood_depth
    }

    pub fn muscle_top(&self) -> f64 {
        self.muscle_bottom() + self.tissue_thickness
    }

    /// Height of the tip apex on the axis.
    pub fn tip_apex(&self) -> f64 {
        self.muscle_top() - self.insertion_depth
    }

    pub fn cap_center(&self) -> f64 {
        self.tip_apex() + self.electrode_radius
    }

    pub fn electrode_top(&self) -> f64 {
        self.tip_apex() + self.electrode_length
    }

    /// Converts a depth below the blood-facing muscle surface to a height.
    pub fn depth_to_z(&self, depth: f64) -> f64 {
        self.muscle_top() - depth
    }

    /// Exact revolved volume of the electrode: hemisphere plus cylinder.
    pub fn electrode_volume(&self) -> f64 {
        let r = self.electrode_radius;
        let cyl = self.electrode_length - r;
        std::f64::consts::PI * r * r * (2.0 * r / 3.0 + cyl)
    }

    /// Exact revolved volume of the electrode part below the muscle surface.
    pub fn embedded_electrode_volume(&self) -> f64 {
        let r = self.electrode_radius;
        let cyl = self.insertion_depth - r;
        std::f64::consts::PI * r * r * (2.0 * r / 3.0 + cyl)
    }

    pub fn region_of(&self, p: Node) -> Region {
        if self.inside_electrode(p) {
            Region::Electrode
        } else if p.z > self.muscle_bottom() && p.z < self.muscle_top() {
            Region::Muscle
        } else {
            Region::Blood
        }
    }

    fn inside_electrode(&self, p: Node) -> bool {
        let zc = self.cap_center();
        if p.z > self.electrode_top() || p.r > self.electrode_radius {
            return false;
        }
        if p.z >= zc {
            return true;
        }
        p.r.hypot(p.z - zc) < self.electrode_radius
    }

    /// Distance from `p` to the electrode (zero inside it).
    fn distance_to_electrode(&self, p: Node) -> f64 {
        let zc = self.cap_center();
        let re = self.electrode_radius;
        let top = self.electrode_top();
        let d = if p.z <= zc {
            p.r.hypot(p.z - zc) - re
        } else if p.z <= top {
            p.r - re
        } else {
            let dr = (p.r - re).max(0.0);
            dr.hypot(p.z - top)
        };
        d.max(0.0)
    }

    fn min_feature(&self) -> f64 {
        [
            self.electrode_radius,
            self.insertion_depth,
            self.electrode_length - self.insertion_depth,
            self.tissue_thickness - self.insertion_depth,
            self.muscle_bottom(),
            self.model_depth - self.electrode_top(),
            self.tissue_radius - self.electrode_radius,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

struct SizeField<'a> {
    geom: &'a ModelGeometry,
    h0: f64,
    h_max: f64,
}

impl SizeField<'_> {
    fn at(&self, p: Node) -> f64 {
        (self.h0 + GRADING * self.geom.distance_to_electrode(p)).min(self.h_max)
    }

    /// Points along `path(s)`, s ∈ [0, 1], spaced to follow the size field.
    fn discretize(&self, path: impl Fn(f64) -> Node, min_segments: usize) -> Vec<Node> {
        const SAMPLES: usize = 2000;
        let mut cumulative = Vec::with_capacity(SAMPLES + 1);
        cumulative.push(0.0);
        let mut prev = path(0.0);
        let mut acc = 0.0;
        for i in 1..=SAMPLES {
            let p = path(i as f64 / SAMPLES as f64);
            let mid = Node::new(0.5 * (p.r + prev.r), 0.5 * (p.z + prev.z));
            acc += p.distance(prev) / self.at(mid);
            cumulative.push(acc);
            prev = p;
        }
        let n = (acc.round() as usize).max(min_segments);
        let mut points = Vec::with_capacity(n + 1);
        points.push(path(0.0));
        let mut k = 0;
        for j in 1..n {
            let target = acc * j as f64 / n as f64;
            while cumulative[k + 1] < target {
                k += 1;
            }
            let frac = (target - cumulative[k]) / (cumulative[k + 1] - cumulative[k]);
            points.push(path((k as f64 + frac) / SAMPLES as f64));
        }
        points.push(path(1.0));
        points
    }
}

fn segment(a: Node, b: Node) -> impl Fn(f64) -> Node {
    move |s| Node::new(a.r + s * (b.r - a.r), a.z + s * (b.z - a.z))
}

/// Triangulates the model cross-section with edges of about
/// `target_edge_length` at the electrode, growing away from it.
pub fn build_geometry(params: &ModelGeometry, target_edge_length: f64) -> Result<Mesh> {
    params.validate()?;
    if !(target_edge_length.is_finite() && target_edge_length > 0.0) {
        return Err(Error::Meshing(format!(
            "target_edge_length must be positive, got {target_edge_length}"
        )));
    }
    if target_edge_length >= params.min_feature() {
        return Err(Error::Meshing(format!(
            "target_edge_length {target_edge_length} is not smaller than the smallest geometric feature {}",
            params.min_feature()
        )));
    }
    let g = params;
    let size = SizeField {
        geom: g,
        h0: target_edge_length,
        h_max: (MAX_EDGE_FRACTION * g.tissue_thickness).max(target_edge_length),
    };

    let (rr, d) = (g.tissue_radius, g.model_depth);
    let (zb, zt) = (g.muscle_bottom(), g.muscle_top());
    let (re, zc, apex, etop) = (g.electrode_radius, g.cap_center(), g.tip_apex(), g.electrode_top());

    let mut polylines: Vec<Vec<Node>> = Vec::new();
    let mut line = |a: Node, b: Node| polylines.push(size.discretize(segment(a, b), 1));
    // axis
    line(Node::new(0.0, 0.0), Node::new(0.0, zb));
    line(Node::new(0.0, zb), Node::new(0.0, apex));
    line(Node::new(0.0, apex), Node::new(0.0, etop));
    line(Node::new(0.0, etop), Node::new(0.0, d));
    // hull
    line(Node::new(0.0, 0.0), Node::new(rr, 0.0));
    line(Node::new(rr, 0.0), Node::new(rr, zb));
    line(Node::new(rr, zb), Node::new(rr, zt));
    line(Node::new(rr, zt), Node::new(rr, d));
    line(Node::new(0.0, d), Node::new(rr, d));
    // muscle faces
    line(Node::new(0.0, zb), Node::new(rr, zb));
    line(Node::new(re, zt), Node::new(rr, zt));
    // electrode side and top
    if zt > zc {
        line(Node::new(re, zc), Node::new(re, zt));
    }
    line(Node::new(re, zt.max(zc)), Node::new(re, etop));
    line(Node::new(0.0, etop), Node::new(re, etop));
    // hemispherical tip, apex to rim
    let arc = move |s: f64| {
        let phi = s * std::f64::consts::FRAC_PI_2;
        Node::new(re * phi.sin(), zc - re * phi.cos())
    };
    polylines.push(size.discretize(arc, 4));

    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    for pl in &polylines {
        let mut prev = None;
        for p in pl {
            let h = cdt
                .insert(Point2::new(p.r, p.z))
                .map_err(|e| Error::Meshing(format!("vertex insertion failed: {e:?}")))?;
            if let Some(prev) = prev {
                if prev != h {
                    cdt.add_constraint(prev, h);
                }
            }
            prev = Some(h);
        }
    }

    let refine = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>| {
        let params = RefinementParameters::<f64>::new()
            .with_angle_limit(AngleLimit::from_deg(MIN_ANGLE_DEG))
            .with_min_required_area(0.02 * target_edge_length * target_edge_length)
            .with_max_additional_vertices(200_000);
        cdt.refine(params).refinement_complete
    };
    refine(&mut cdt);
    for _ in 0..60 {
        let mut inserts = Vec::new();
        for face in cdt.inner_faces() {
            let [a, b, c] = face.positions();
            let cen = Node::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
            let longest = [(a, b), (b, c), (c, a)]
                .iter()
                .map(|(p, q)| (p.x - q.x).hypot(p.y - q.y))
                .fold(0.0, f64::max);
            if longest > 1.4 * size.at(cen) {
                inserts.push(cen);
            }
        }
        if inserts.is_empty() {
            break;
        }
        for p in inserts {
            cdt.insert(Point2::new(p.r, p.z))
                .map_err(|e| Error::Meshing(format!("steiner insertion failed: {e:?}")))?;
        }
        refine(&mut cdt);
    }

    let mut nodes: Vec<Node> = cdt.vertices().map(|v| Node::new(v.position().x, v.position().y)).collect();
    // snap hull coordinates exactly; spade splits constraints at exact midpoints
    // but guard against rounding at the far sides
    let snap = |v: &mut f64, targets: [f64; 2]| {
        for t in targets {
            if (*v - t).abs() < 1e-12 * d {
                *v = t;
            }
        }
    };
    for p in &mut nodes {
        snap(&mut p.r, [0.0, rr]);
        snap(&mut p.z, [0.0, d]);
    }
    let cap = CapArc { center_z: zc, radius: re };

    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        let mut ids = face.vertices().map(|v| v.fix().index());
        if signed_area(nodes[ids[0]], nodes[ids[1]], nodes[ids[2]]) < 0.0 {
            ids.swap(1, 2);
        }
        let [a, b, c] = ids.map(|i| nodes[i]);
        let cen = Node::new((a.r + b.r + c.r) / 3.0, (a.z + b.z + c.z) / 3.0);
        triangles.push(Triangle { nodes: ids, region: g.region_of(cen) });
    }

    let mut mesh = Mesh {
        nodes,
        triangles,
        boundary_edges: Vec::new(),
        cap: Some(cap),
    };
    tag_edges(&mut mesh, g)?;

    // spade splits the tip chords at their midpoints; put those nodes back on the arc
    let tip_nodes: Vec<usize> = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.tag == BoundaryTag::ElectrodeSurface)
        .flat_map(|e| e.nodes)
        .filter(|&v| mesh.nodes[v].z < zc)
        .collect();
    for v in tip_nodes {
        mesh.nodes[v] = cap.project(mesh.nodes[v]);
    }

    for r in Region::ALL {
        if !mesh.triangles.iter().any(|t| t.region == r) {
            return Err(Error::Meshing(format!("region {r:?} received no triangles")));
        }
    }
    for tag in BoundaryTag::ALL {
        if !mesh.has_tag(tag) {
            return Err(Error::Meshing(format!("no edges tagged {tag:?}")));
        }
    }
    mesh.validate().map_err(|e| Error::Meshing(e.to_string()))?;
    Ok(mesh)
}

fn tag_edges(mesh: &mut Mesh, g: &ModelGeometry) -> Result<()> {
    let eps = 1e-12 * g.model_depth;
    let on_hull = |p: Node| {
        (p.r - g.tissue_radius).abs() <= eps || p.z.abs() <= eps || (p.z - g.model_depth).abs() <= eps
    };
    let mut edges = Vec::new();
    for ((a, b), owners) in mesh.edge_map() {
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        match owners.as_slice() {
            &[e] => {
                // orient hull edges along the owner's counter-clockwise traversal
                let t = mesh.triangles[e].nodes;
                let k = t.iter().position(|&v| v == a).unwrap();
                let nodes = if t[(k + 1) % 3] == b { [a, b] } else { [b, a] };
                let tag = if pa.r == 0.0 && pb.r == 0.0 {
                    BoundaryTag::Axis
                } else if on_hull(pa) && on_hull(pb) {
                    BoundaryTag::OuterGroundAndThermal
                } else {
                    return Err(Error::Meshing(format!(
                        "edge ({a}, {b}) is open but lies inside the domain"
                    )));
                };
                edges.push(BoundaryEdge { nodes, tag });
            }
            &[e0, e1] => {
                let mut pair = [mesh.triangles[e0].region, mesh.triangles[e1].region];
                pair.sort();
                use Region::*;
                match pair {
                    [Electrode, Muscle] => edges.push(BoundaryEdge {
                        nodes: [a, b],
                        tag: BoundaryTag::ElectrodeSurface,
                    }),
                    [Electrode, Blood] => {
                        edges.push(BoundaryEdge { nodes: [a, b], tag: BoundaryTag::ElectrodeSurface });
                        edges.push(BoundaryEdge {
                            nodes: [a, b],
                            tag: BoundaryTag::ElectrodeBloodInterface,
                        });
                    }
                    [Muscle, Blood] => edges.push(BoundaryEdge {
                        nodes: [a, b],
                        tag: BoundaryTag::MuscleBloodInterface,
                    }),
                    _ => {}
                }
            }
            _ => {
                return Err(Error::Meshing(format!(
                    "edge {:?} shared by {} triangles",
                    edge_key(a, b),
                    owners.len()
                )))
            }
        }
    }
    mesh.boundary_edges = edges;
    Ok(())
}
