use std::f64::consts::PI;

use super::{CoefficientMap, CsrMatrix, TripletBuilder};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh};

/// Shape-function gradients `[∂φ/∂r, ∂φ/∂z]` of one element and its area.
pub fn element_gradients(mesh: &Mesh, element: usize) -> Result<([[f64; 2]; 3], f64)> {
    let [a, b, c] = mesh.vertices(element);
    let area = mesh.signed_area(element);
    if !(area > 0.0) {
        return Err(Error::DegenerateElement { element, area });
    }
    let inv = 0.5 / area;
    let grads = [
        [(b.z - c.z) * inv, (c.r - b.r) * inv],
        [(c.z - a.z) * inv, (a.r - c.r) * inv],
        [(a.z - b.z) * inv, (b.r - a.r) * inv],
    ];
    Ok((grads, area))
}

/// `K_ij = Σ_e ∫ coeff ∇φ_i·∇φ_j 2πr dA`.
pub fn assemble_stiffness(mesh: &Mesh, coeff: &CoefficientMap) -> Result<CsrMatrix> {
    let mut b = TripletBuilder::with_capacity(mesh.node_count(), 9 * mesh.triangle_count());
    for (e, t) in mesh.triangles.iter().enumerate() {
        let (g, area) = element_gradients(mesh, e)?;
        let k = coeff.get(t.region);
        if k == 0.0 {
            continue;
        }
        let [a, bb, c] = mesh.vertices(e);
        let weight = k * 2.0 * PI * area * (a.r + bb.r + c.r) / 3.0;
        for i in 0..3 {
            for j in 0..3 {
                let v = weight * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                b.add(t.nodes[i], t.nodes[j], v);
            }
        }
    }
    Ok(b.build())
}

/// Consistent mass `∫ coeff φ_i φ_j 2πr dA`, or its row-sum lumped diagonal.
pub fn assemble_mass(mesh: &Mesh, coeff: &CoefficientMap, lumped: bool) -> Result<CsrMatrix> {
    let mut b = TripletBuilder::with_capacity(mesh.node_count(), 9 * mesh.triangle_count());
    for (e, t) in mesh.triangles.iter().enumerate() {
        let (_, area) = element_gradients(mesh, e)?;
        let c = coeff.get(t.region);
        if c == 0.0 {
            continue;
        }
        let r = mesh.vertices(e).map(|p| p.r);
        let rs = r[0] + r[1] + r[2];
        let s = c * 2.0 * PI * area;
        for i in 0..3 {
            if lumped {
                b.add(t.nodes[i], t.nodes[i], s * (rs + r[i]) / 12.0);
                continue;
            }
            for j in 0..3 {
                let v = if i == j {
                    s * (rs + 2.0 * r[i]) / 30.0
                } else {
                    s * (2.0 * (r[i] + r[j]) + (rs - r[i] - r[j])) / 60.0
                };
                b.add(t.nodes[i], t.nodes[j], v);
            }
        }
    }
    Ok(b.build())
}

/// `∫ q_e φ_i 2πr dA` for a piecewise-constant source `q` (one value per element).
pub fn element_load(mesh: &Mesh, q: &[f64]) -> Vec<f64> {
    assert_eq!(q.len(), mesh.triangle_count());
    let mut f = vec![0.0; mesh.node_count()];
    for (e, t) in mesh.triangles.iter().enumerate() {
        if q[e] == 0.0 {
            continue;
        }
        let r = mesh.vertices(e).map(|p| p.r);
        let rs = r[0] + r[1] + r[2];
        let s = q[e] * 2.0 * PI * mesh.signed_area(e);
        for i in 0..3 {
            f[t.nodes[i]] += s * (rs + r[i]) / 12.0;
        }
    }
    f
}

/// Exact `∫ φ_i φ_j 2πr ds` on a straight edge.
fn edge_mass(mesh: &Mesh, nodes: [usize; 2]) -> [[f64; 2]; 2] {
    let (p, q) = (mesh.nodes[nodes[0]], mesh.nodes[nodes[1]]);
    let len = p.distance(q);
    let s = 2.0 * PI * len / 12.0;
    [
        [s * (3.0 * p.r + q.r), s * (p.r + q.r)],
        [s * (p.r + q.r), s * (p.r + 3.0 * q.r)],
    ]
}

/// Convective film on edges tagged `tag`: matrix `∫ h φ_i φ_j 2πr ds` and
/// load `∫ h T_ref φ_i 2πr ds`.
pub fn assemble_robin(
    mesh: &Mesh,
    tag: BoundaryTag,
    h: f64,
    t_ref: f64,
) -> Result<(CsrMatrix, Vec<f64>)> {
    if !mesh.has_tag(tag) {
        return Err(Error::UnknownTag(tag));
    }
    let edges: Vec<([usize; 2], f64)> = mesh.edges_with_tag(tag).map(|e| (e.nodes, h)).collect();
    assemble_film(mesh, &edges, t_ref)
}

/// Robin film over an explicit list of `(edge nodes, h)`.
pub fn assemble_film(
    mesh: &Mesh,
    edges: &[([usize; 2], f64)],
    t_ref: f64,
) -> Result<(CsrMatrix, Vec<f64>)> {
    let mut b = TripletBuilder::new(mesh.node_count());
    let mut load = vec![0.0; mesh.node_count()];
    for &(nodes, h) in edges {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::InvalidParameter(format!("film coefficient must be >= 0, got {h}")));
        }
        let m = edge_mass(mesh, nodes);
        for i in 0..2 {
            for j in 0..2 {
                b.add(nodes[i], nodes[j], h * m[i][j]);
                load[nodes[i]] += h * t_ref * m[i][j];
            }
        }
    }
    Ok((b.build(), load))
}

/// An interface edge duplicated on two sides of a contact film. Node pairs
/// are geometrically coincident: `solid[k]` and `fluid[k]` sit at the same point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEdge {
    pub solid: [usize; 2],
    pub fluid: [usize; 2],
    pub h: f64,
}

/// Two-sided film `∫ h (u_s − u_f)(w_s − w_f) 2πr ds`; the geometry is read
/// from the solid-side nodes.
pub fn assemble_contact(mesh: &Mesh, edges: &[ContactEdge]) -> Result<CsrMatrix> {
    let mut b = TripletBuilder::with_capacity(mesh.node_count(), 16 * edges.len());
    for edge in edges {
        if !(edge.h.is_finite() && edge.h >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "film coefficient must be >= 0, got {}",
                edge.h
            )));
        }
        let m = edge_mass(mesh, edge.solid);
        for i in 0..2 {
            for j in 0..2 {
                let v = edge.h * m[i][j];
                b.add(edge.solid[i], edge.solid[j], v);
                b.add(edge.fluid[i], edge.fluid[j], v);
                b.add(edge.solid[i], edge.fluid[j], -v);
                b.add(edge.fluid[i], edge.solid[j], -v);
            }
        }
    }
    Ok(b.build())
}
