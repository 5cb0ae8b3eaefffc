use crate::error::Result;
use crate::mesh::{edge_key, BoundaryEdge, BoundaryTag, Mesh, Region};

/// One blood-film edge with its two coincident copies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmEdge {
    pub solid: [usize; 2],
    pub blood: [usize; 2],
    pub tag: BoundaryTag,
}

/// A mesh whose blood side is detached along the film interfaces, so the
/// temperature may jump across a convective film.
///
/// Triangles keep their order and region, so per-element data from the
/// parent mesh (the Joule source) carries over unchanged. Blood copies of
/// interface nodes are appended after the parent's nodes.
#[derive(Debug, Clone)]
pub struct ThermalMesh {
    pub mesh: Mesh,
    /// Parent node of every node.
    pub parent: Vec<usize>,
    pub films: Vec<FilmEdge>,
}

impl ThermalMesh {
    /// Splits along `ElectrodeBloodInterface` and `MuscleBloodInterface`.
    pub fn split(parent_mesh: &Mesh) -> Result<ThermalMesh> {
        parent_mesh.validate()?;
        let n = parent_mesh.node_count();
        let mut nodes = parent_mesh.nodes.clone();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut copy: Vec<Option<usize>> = vec![None; n];
        let interface_edges: Vec<&BoundaryEdge> = parent_mesh
            .boundary_edges
            .iter()
            .filter(|e| e.tag.is_film())
            .collect();
        for e in &interface_edges {
            for &v in &e.nodes {
                if copy[v].is_none() {
                    copy[v] = Some(nodes.len());
                    nodes.push(parent_mesh.nodes[v]);
                    parent.push(v);
                }
            }
        }
        let blood_side = |v: usize| copy[v].unwrap_or(v);

        let mut triangles = parent_mesh.triangles.clone();
        for t in triangles.iter_mut().filter(|t| t.region == Region::Blood) {
            t.nodes = t.nodes.map(blood_side);
        }

        let owners = parent_mesh.edge_map();
        let mut boundary_edges = Vec::with_capacity(parent_mesh.boundary_edges.len() + interface_edges.len());
        let mut films = Vec::with_capacity(interface_edges.len());
        for e in &parent_mesh.boundary_edges {
            if e.tag.is_film() {
                let blood = e.nodes.map(blood_side);
                boundary_edges.push(*e);
                boundary_edges.push(BoundaryEdge { nodes: blood, tag: e.tag });
                films.push(FilmEdge { solid: e.nodes, blood, tag: e.tag });
                continue;
            }
            let key = edge_key(e.nodes[0], e.nodes[1]);
            let in_blood = owners[&key].iter().all(|&t| parent_mesh.triangles[t].region == Region::Blood);
            let nodes = if in_blood { e.nodes.map(blood_side) } else { e.nodes };
            boundary_edges.push(BoundaryEdge { nodes, tag: e.tag });
        }

        let mesh = Mesh { nodes, triangles, boundary_edges, cap: parent_mesh.cap };
        mesh.validate()?;
        Ok(ThermalMesh { mesh, parent, films })
    }

    /// Number of nodes in the parent mesh; they come first here.
    pub fn parent_node_count(&self) -> usize {
        self.parent.len() - self.films_node_copies()
    }

    fn films_node_copies(&self) -> usize {
        self.parent.iter().enumerate().filter(|(i, &p)| *i != p).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{rectangle, RectangleSpec};

    /// Muscle below blood, joined along z = 1 with a muscle–blood film.
    fn two_layers() -> Mesh {
        let muscle = rectangle(
            &RectangleSpec::new((0.0, 1.0), (0.0, 1.0), 3, 2)
                .region(Region::Muscle)
                .sides([Some(BoundaryTag::Axis), Some(BoundaryTag::OuterGroundAndThermal), Some(BoundaryTag::OuterGroundAndThermal), None]),
        )
        .unwrap();
        let blood = rectangle(
            &RectangleSpec::new((0.0, 1.0), (1.0, 2.0), 3, 2)
                .region(Region::Blood)
                .sides([Some(BoundaryTag::Axis), Some(BoundaryTag::OuterGroundAndThermal), None, Some(BoundaryTag::OuterGroundAndThermal)]),
        )
        .unwrap();
        crate::mesh::merge(&muscle, &blood, BoundaryTag::MuscleBloodInterface).unwrap()
    }

    #[test]
    fn split_duplicates_interface_nodes() {
        let mesh = two_layers();
        let tm = ThermalMesh::split(&mesh).unwrap();
        assert_eq!(tm.mesh.node_count(), mesh.node_count() + 4);
        assert_eq!(tm.films.len(), 3);
        assert_eq!(tm.parent_node_count(), mesh.node_count());
        for f in &tm.films {
            for k in 0..2 {
                assert_ne!(f.solid[k], f.blood[k]);
                assert_eq!(tm.mesh.nodes[f.solid[k]], tm.mesh.nodes[f.blood[k]]);
            }
        }
        assert!((tm.mesh.total_volume() - mesh.total_volume()).abs() < 1e-14);
    }
}
