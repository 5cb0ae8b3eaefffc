//! Structured rectangle meshes for synthetic problems (slabs, strips, annuli).

use std::collections::BTreeMap;

use super::{edge_key, BoundaryEdge, BoundaryTag, Mesh, Node, Region, Triangle};
use crate::error::{Error, Result};

/// Node spacing along one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    /// Successive cell widths grow by this factor from the low end.
    Geometric(f64),
}

impl Grading {
    fn coordinates(self, lo: f64, hi: f64, cells: usize) -> Vec<f64> {
        match self {
            Grading::Uniform => (0..=cells)
                .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
                .collect(),
            Grading::Geometric(q) if (q - 1.0).abs() < 1e-14 => {
                Grading::Uniform.coordinates(lo, hi, cells)
            }
            Grading::Geometric(q) => {
                let total = (q.powi(cells as i32) - 1.0) / (q - 1.0);
                let mut x = Vec::with_capacity(cells + 1);
                let mut acc = 0.0;
                x.push(lo);
                for i in 0..cells {
                    acc += q.powi(i as i32);
                    x.push(lo + (hi - lo) * acc / total);
                }
                x[cells] = hi;
                x
            }
        }
    }
}

/// An axis-aligned `[r_min, r_max] × [z_min, z_max]` block of one region.
///
/// Each side gets an optional boundary tag (`None` leaves it untagged,
/// i.e. a natural zero-flux boundary). A side on `r = 0` may only carry
/// [`BoundaryTag::Axis`].
#[derive(Debug, Clone, PartialEq)]
pub struct RectangleSpec {
    pub r_range: (f64, f64),
    pub z_range: (f64, f64),
    pub cells_r: usize,
    pub cells_z: usize,
    pub grading_r: Grading,
    pub grading_z: Grading,
    pub region: Region,
    /// Tags for the sides r = r_min, r = r_max, z = z_min, z = z_max.
    pub sides: [Option<BoundaryTag>; 4],
}

impl RectangleSpec {
    pub fn new(r_range: (f64, f64), z_range: (f64, f64), cells_r: usize, cells_z: usize) -> Self {
        RectangleSpec {
            r_range,
            z_range,
            cells_r,
            cells_z,
            grading_r: Grading::Uniform,
            grading_z: Grading::Uniform,
            region: Region::Muscle,
            sides: [None; 4],
        }
    }

    pub fn region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    pub fn sides(mut self, sides: [Option<BoundaryTag>; 4]) -> Self {
        self.sides = sides;
        self
    }

    pub fn grading_r(mut self, g: Grading) -> Self {
        self.grading_r = g;
        self
    }

    pub fn grading_z(mut self, g: Grading) -> Self {
        self.grading_z = g;
        self
    }
}

/// Builds the rectangle with alternating quad diagonals.
pub fn rectangle(spec: &RectangleSpec) -> Result<Mesh> {
    let (r0, r1) = spec.r_range;
    let (z0, z1) = spec.z_range;
    if !(r0 >= 0.0 && r1 > r0 && z1 > z0) {
        return Err(Error::InvalidParameter(format!(
            "rectangle needs 0 <= r_min < r_max and z_min < z_max, got r {:?} z {:?}",
            spec.r_range, spec.z_range
        )));
    }
    if spec.cells_r == 0 || spec.cells_z == 0 {
        return Err(Error::InvalidParameter("rectangle needs at least one cell per direction".into()));
    }
    if r0 == 0.0 && spec.sides[0].is_some_and(|t| t != BoundaryTag::Axis) {
        return Err(Error::InvalidParameter("side on r = 0 may only be tagged Axis".into()));
    }
    let rs = spec.grading_r.coordinates(r0, r1, spec.cells_r);
    let zs = spec.grading_z.coordinates(z0, z1, spec.cells_z);
    let nr = rs.len();
    let id = |i: usize, j: usize| j * nr + i;

    let mut nodes = Vec::with_capacity(nr * zs.len());
    for &z in &zs {
        for &r in &rs {
            nodes.push(Node::new(r, z));
        }
    }
    let mut triangles = Vec::with_capacity(2 * spec.cells_r * spec.cells_z);
    for j in 0..spec.cells_z {
        for i in 0..spec.cells_r {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let pair = if (i + j) % 2 == 0 {
                [[a, b, c], [a, c, d]]
            } else {
                [[a, b, d], [b, c, d]]
            };
            for nodes in pair {
                triangles.push(Triangle { nodes, region: spec.region });
            }
        }
    }

    let mut boundary_edges = Vec::new();
    let mut push = |tag: Option<BoundaryTag>, a: usize, b: usize| {
        if let Some(tag) = tag {
            boundary_edges.push(BoundaryEdge { nodes: [a, b], tag });
        }
    };
    for j in 0..spec.cells_z {
        push(spec.sides[0], id(0, j + 1), id(0, j));
        push(spec.sides[1], id(nr - 1, j), id(nr - 1, j + 1));
    }
    for i in 0..spec.cells_r {
        push(spec.sides[2], id(i, 0), id(i + 1, 0));
        push(spec.sides[3], id(i + 1, spec.cells_z), id(i, spec.cells_z));
    }

    let mesh = Mesh {
        nodes,
        triangles,
        boundary_edges,
        cap: None,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Glues two meshes along the nodes they share (exactly equal coordinates).
/// Edges that end up between the two parts are tagged `interface`; tagged
/// edges of either part that became interior are dropped.
pub fn merge(a: &Mesh, b: &Mesh, interface: BoundaryTag) -> Result<Mesh> {
    let mut nodes = a.nodes.clone();
    let mut index: BTreeMap<(u64, u64), usize> = a
        .nodes
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.r.to_bits(), p.z.to_bits()), i))
        .collect();
    let remap: Vec<usize> = b
        .nodes
        .iter()
        .map(|p| {
            *index.entry((p.r.to_bits(), p.z.to_bits())).or_insert_with(|| {
                nodes.push(*p);
                nodes.len() - 1
            })
        })
        .collect();
    let mut triangles = a.triangles.clone();
    triangles.extend(b.triangles.iter().map(|t| Triangle { nodes: t.nodes.map(|v| remap[v]), region: t.region }));

    let split = a.triangles.len();
    let mut owners: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            owners.entry(edge_key(t.nodes[k], t.nodes[(k + 1) % 3])).or_default().push(e);
        }
    }
    let mut boundary_edges: Vec<BoundaryEdge> = a
        .boundary_edges
        .iter()
        .copied()
        .chain(b.boundary_edges.iter().map(|e| BoundaryEdge { nodes: e.nodes.map(|v| remap[v]), tag: e.tag }))
        .filter(|e| owners[&edge_key(e.nodes[0], e.nodes[1])].len() == 1)
        .collect();
    for (&(p, q), o) in &owners {
        if o.len() == 2 && (o[0] < split) != (o[1] < split) {
            boundary_edges.push(BoundaryEdge { nodes: [p, q], tag: interface });
        }
    }
    let mesh = Mesh { nodes, triangles, boundary_edges, cap: None };
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_volume() {
        let spec = RectangleSpec::new((0.0, 0.02), (0.0, 0.008), 10, 4)
            .sides([Some(BoundaryTag::Axis), None, None, None]);
        let m = rectangle(&spec).unwrap();
        assert_eq!(m.node_count(), 11 * 5);
        assert_eq!(m.triangle_count(), 80);
        let exact = std::f64::consts::PI * 0.02f64.powi(2) * 0.008;
        assert!((m.total_volume() - exact).abs() / exact < 1e-13);
    }

    #[test]
    fn geometric_grading_hits_endpoints() {
        let x = Grading::Geometric(1.2).coordinates(1.0, 2.0, 7);
        assert_eq!(x.len(), 8);
        assert_eq!(x[0], 1.0);
        assert_eq!(x[7], 2.0);
        assert!(x.windows(3).all(|w| w[2] - w[1] > w[1] - w[0]));
    }
}
