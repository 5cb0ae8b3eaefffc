//! Axisymmetric triangulations of the r–z half plane.
//!
//! Coordinates are in metres, `r` is the distance from the symmetry axis and
//! `z` the height above the bottom of the model. Triangles are stored
//! counter-clockwise in the (r, z) plane so every element has a positive
//! signed area.

mod geometry;
pub mod io;
mod quality;
mod structured;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use geometry::{build_geometry, ModelGeometry, DEFAULT_TARGET_EDGE_LENGTH};
pub use quality::{mesh_quality, QualityReport};
pub use structured::{merge, rectangle, Grading, RectangleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    Electrode,
    Muscle,
    Blood,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Electrode, Region::Muscle, Region::Blood];

    pub fn index(self) -> usize {
        match self {
            Region::Electrode => 0,
            Region::Muscle => 1,
            Region::Blood => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Electrode => "electrode",
            Region::Muscle => "muscle",
            Region::Blood => "blood",
        }
    }

    pub fn from_name(name: &str) -> Option<Region> {
        Region::ALL.into_iter().find(|r| r.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundaryTag {
    Axis,
    OuterGroundAndThermal,
    /// Electrode boundary against tissue or blood; carries the applied potential.
    ElectrodeSurface,
    ElectrodeBloodInterface,
    MuscleBloodInterface,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 5] = [
        BoundaryTag::Axis,
        BoundaryTag::OuterGroundAndThermal,
        BoundaryTag::ElectrodeSurface,
        BoundaryTag::ElectrodeBloodInterface,
        BoundaryTag::MuscleBloodInterface,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Axis => "axis",
            BoundaryTag::OuterGroundAndThermal => "outer",
            BoundaryTag::ElectrodeSurface => "electrode_surface",
            BoundaryTag::ElectrodeBloodInterface => "electrode_blood",
            BoundaryTag::MuscleBloodInterface => "muscle_blood",
        }
    }

    pub fn from_name(name: &str) -> Option<BoundaryTag> {
        BoundaryTag::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Interface tags sit between two meshed regions rather than on the hull.
    pub fn is_interface(self) -> bool {
        matches!(
            self,
            BoundaryTag::ElectrodeSurface
                | BoundaryTag::ElectrodeBloodInterface
                | BoundaryTag::MuscleBloodInterface
        )
    }

    /// Blood-film interfaces, where the thermal model may carry a jump.
    pub fn is_film(self) -> bool {
        matches!(self, BoundaryTag::ElectrodeBloodInterface | BoundaryTag::MuscleBloodInterface)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub r: f64,
    pub z: f64,
}

impl Node {
    pub fn new(r: f64, z: f64) -> Self {
        Node { r, z }
    }

    pub fn distance(self, other: Node) -> f64 {
        (self.r - other.r).hypot(self.z - other.z)
    }

    fn midpoint(self, other: Node) -> Node {
        Node::new(0.5 * (self.r + other.r), 0.5 * (self.z + other.z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub nodes: [usize; 3],
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Circular arc `(r - 0)^2 + (z - center_z)^2 = radius^2, z <= center_z`,
/// the hemispherical electrode tip. Nodes created on it by refinement are
/// projected back onto the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapArc {
    pub center_z: f64,
    pub radius: f64,
}

impl CapArc {
    fn contains(&self, p: Node) -> bool {
        let d = p.r.hypot(p.z - self.center_z);
        p.z <= self.center_z + 1e-12 && (d - self.radius).abs() <= 1e-9 * self.radius.max(1.0)
    }

    fn project(&self, p: Node) -> Node {
        let dr = p.r;
        let dz = p.z - self.center_z;
        let d = dr.hypot(dz);
        if d == 0.0 {
            return p;
        }
        let s = self.radius / d;
        Node::new((dr * s).max(0.0), self.center_z + dz * s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub triangles: Vec<Triangle>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub cap: Option<CapArc>,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self, element: usize) -> [Node; 3] {
        let t = &self.triangles[element];
        [self.nodes[t.nodes[0]], self.nodes[t.nodes[1]], self.nodes[t.nodes[2]]]
    }

    pub fn signed_area(&self, element: usize) -> f64 {
        let [a, b, c] = self.vertices(element);
        signed_area(a, b, c)
    }

    /// `∫ 2πr dA` over one element; exact for linear `r`.
    pub fn revolved_volume(&self, element: usize) -> f64 {
        let [a, b, c] = self.vertices(element);
        2.0 * PI * signed_area(a, b, c) * (a.r + b.r + c.r) / 3.0
    }

    pub fn region_volume(&self, region: Region) -> f64 {
        (0..self.triangles.len())
            .filter(|&e| self.triangles[e].region == region)
            .map(|e| self.revolved_volume(e))
            .sum()
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.triangles.len()).map(|e| self.revolved_volume(e)).sum()
    }

    pub fn region_area(&self, region: Region) -> f64 {
        (0..self.triangles.len())
            .filter(|&e| self.triangles[e].region == region)
            .map(|e| self.signed_area(e))
            .sum()
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(move |e| e.tag == tag)
    }

    /// Sorted, de-duplicated node indices touched by edges with `tag`.
    pub fn nodes_with_tag(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut nodes: Vec<usize> = self.edges_with_tag(tag).flat_map(|e| e.nodes).collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.boundary_edges.iter().any(|e| e.tag == tag)
    }

    /// Map from each undirected edge to the triangles that use it, in element order.
    pub(crate) fn edge_map(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                map.entry(edge_key(t.nodes[k], t.nodes[(k + 1) % 3]))
                    .or_default()
                    .push(e);
            }
        }
        map
    }

    /// Checks the structural invariants: positive orientation, non-negative
    /// radii, axis edges on `r = 0`, conformity, and interface edges lying
    /// between the regions their tag names.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for (i, p) in self.nodes.iter().enumerate() {
            if !(p.r.is_finite() && p.z.is_finite()) {
                return Err(Error::InvalidMesh(format!("node {i} has non-finite coordinates")));
            }
            if p.r < 0.0 {
                return Err(Error::InvalidMesh(format!("node {i} has r = {} < 0", p.r)));
            }
        }
        for (e, t) in self.triangles.iter().enumerate() {
            if t.nodes.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(format!("triangle {e} references a missing node")));
            }
            let area = self.signed_area(e);
            if area <= 0.0 {
                return Err(Error::DegenerateElement { element: e, area });
            }
        }
        let edges = self.edge_map();
        for (&(a, b), owners) in &edges {
            if owners.len() > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({a}, {b}) is shared by {} triangles",
                    owners.len()
                )));
            }
        }
        for (i, be) in self.boundary_edges.iter().enumerate() {
            let [a, b] = be.nodes;
            if a >= n || b >= n {
                return Err(Error::InvalidMesh(format!("boundary edge {i} references a missing node")));
            }
            let Some(owners) = edges.get(&edge_key(a, b)) else {
                return Err(Error::InvalidMesh(format!("boundary edge {i} is not a mesh edge")));
            };
            let regions: Vec<Region> = owners.iter().map(|&e| self.triangles[e].region).collect();
            let ok = match be.tag {
                BoundaryTag::Axis => {
                    self.nodes[a].r == 0.0 && self.nodes[b].r == 0.0 && owners.len() == 1
                }
                BoundaryTag::OuterGroundAndThermal => owners.len() == 1,
                BoundaryTag::ElectrodeSurface => {
                    // a driven hull edge, as on synthetic meshes
                    owners.len() == 1
                        || (regions.contains(&Region::Electrode)
                            && regions.iter().any(|&r| r != Region::Electrode))
                }
                BoundaryTag::ElectrodeBloodInterface => {
                    has_pair(&regions, Region::Electrode, Region::Blood)
                        // split thermal meshes carry each side separately
                        || owners.len() == 1
                }
                BoundaryTag::MuscleBloodInterface => {
                    has_pair(&regions, Region::Muscle, Region::Blood) || owners.len() == 1
                }
            };
            if !ok {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge {i} ({a}, {b}) tagged {:?} sits between {:?}",
                    be.tag, regions
                )));
            }
        }
        Ok(())
    }

    /// Uniform 4-way midpoint subdivision. Region and boundary tags are
    /// inherited; midpoints of edges on the electrode cap are projected back
    /// onto the arc.
    pub fn refine(&self) -> Result<Mesh> {
        self.validate()?;
        let mut nodes = self.nodes.clone();
        let cap_edges: std::collections::BTreeSet<(usize, usize)> = match self.cap {
            Some(cap) => self
                .edges_with_tag(BoundaryTag::ElectrodeSurface)
                .filter(|e| e.nodes.iter().all(|&v| cap.contains(self.nodes[v])))
                .map(|e| edge_key(e.nodes[0], e.nodes[1]))
                .collect(),
            None => Default::default(),
        };
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut mid = |a: usize, b: usize, nodes: &mut Vec<Node>| -> usize {
            *midpoint.entry(edge_key(a, b)).or_insert_with(|| {
                let mut m = nodes[a].midpoint(nodes[b]);
                if let Some(cap) = self.cap {
                    if cap_edges.contains(&edge_key(a, b)) {
                        m = cap.project(m);
                    }
                }
                nodes.push(m);
                nodes.len() - 1
            })
        };

        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = t.nodes;
            let ab = mid(a, b, &mut nodes);
            let bc = mid(b, c, &mut nodes);
            let ca = mid(c, a, &mut nodes);
            for nodes in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
                triangles.push(Triangle { nodes, region: t.region });
            }
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for be in &self.boundary_edges {
            let [a, b] = be.nodes;
            let m = mid(a, b, &mut nodes);
            boundary_edges.push(BoundaryEdge { nodes: [a, m], tag: be.tag });
            boundary_edges.push(BoundaryEdge { nodes: [m, b], tag: be.tag });
        }
        let refined = Mesh {
            nodes,
            triangles,
            boundary_edges,
            cap: self.cap,
        };
        refined.validate()?;
        Ok(refined)
    }

    /// Index of the first triangle (in element order) containing `p`, with a
    /// small relative tolerance so points on shared edges resolve.
    pub fn locate(&self, p: Node) -> Option<(usize, [f64; 3])> {
        for e in 0..self.triangles.len() {
            let [a, b, c] = self.vertices(e);
            let area = signed_area(a, b, c);
            let l0 = signed_area(p, b, c) / area;
            let l1 = signed_area(a, p, c) / area;
            let l2 = 1.0 - l0 - l1;
            let tol = -1e-10;
            if l0 >= tol && l1 >= tol && l2 >= tol {
                return Some((e, [l0, l1, l2]));
            }
        }
        None
    }
}

fn has_pair(regions: &[Region], a: Region, b: Region) -> bool {
    regions.len() == 2 && regions.contains(&a) && regions.contains(&b)
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn signed_area(a: Node, b: Node, c: Node) -> f64 {
    0.5 * ((b.r - a.r) * (c.z - a.z) - (c.r - a.r) * (b.z - a.z))
}
