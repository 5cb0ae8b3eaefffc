//! Plain-text mesh and nodal-field files.
//!
//! Mesh layout:
//!
//! ```text
//! <node count> <triangle count> <edge count>
//! # cap <center_z> <radius>          (optional)
//! <index> <r> <z>                    (one per node)
//! <index> <n1> <n2> <n3> <region>    (one per triangle)
//! <index> <n1> <n2> <tag>            (one per boundary edge)
//! ```
//!
//! Nodal fields are `<index> <value>` lines with an `index value` header.
//! Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryEdge, BoundaryTag, CapArc, Mesh, Node, Region, Triangle};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} {} {}",
        mesh.nodes.len(),
        mesh.triangles.len(),
        mesh.boundary_edges.len()
    );
    if let Some(cap) = mesh.cap {
        let _ = writeln!(s, "# cap {} {}", cap.center_z, cap.radius);
    }
    for (i, p) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{i} {} {}", p.r, p.z);
    }
    for (i, t) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = t.nodes;
        let _ = writeln!(s, "{i} {a} {b} {c} {}", t.region.name());
    }
    for (i, e) in mesh.boundary_edges.iter().enumerate() {
        let [a, b] = e.nodes;
        let _ = writeln!(s, "{i} {a} {b} {}", e.tag.name());
    }
    s
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let bad = |line: usize, msg: &str| Error::Parse {
        path: "<mesh>".into(),
        message: format!("line {}: {msg}", line + 1),
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| bad(0, "empty file"))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(hl, "bad header count")))
        .collect::<Result<_>>()?;
    let [nn, nt, ne] = counts[..] else {
        return Err(bad(hl, "header must hold three counts"));
    };

    let mut cap = None;
    let mut nodes = Vec::with_capacity(nn);
    let mut triangles = Vec::with_capacity(nt);
    let mut boundary_edges = Vec::with_capacity(ne);
    for (ln, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok[0] == "#" {
            if tok.get(1) == Some(&"cap") && tok.len() == 4 {
                let center_z = tok[2].parse().map_err(|_| bad(ln, "bad cap centre"))?;
                let radius = tok[3].parse().map_err(|_| bad(ln, "bad cap radius"))?;
                cap = Some(CapArc { center_z, radius });
            }
            continue;
        }
        let num = |k: usize| -> Result<f64> {
            tok.get(k)
                .ok_or_else(|| bad(ln, "missing field"))?
                .parse()
                .map_err(|_| bad(ln, "bad number"))
        };
        let idx = |k: usize| -> Result<usize> {
            tok.get(k)
                .ok_or_else(|| bad(ln, "missing field"))?
                .parse()
                .map_err(|_| bad(ln, "bad index"))
        };
        if nodes.len() < nn {
            if tok.len() != 3 || idx(0)? != nodes.len() {
                return Err(bad(ln, "expected `index r z`"));
            }
            nodes.push(Node::new(num(1)?, num(2)?));
        } else if triangles.len() < nt {
            if tok.len() != 5 || idx(0)? != triangles.len() {
                return Err(bad(ln, "expected `index n1 n2 n3 region`"));
            }
            let region = Region::from_name(tok[4]).ok_or_else(|| bad(ln, "unknown region"))?;
            triangles.push(Triangle { nodes: [idx(1)?, idx(2)?, idx(3)?], region });
        } else if boundary_edges.len() < ne {
            if tok.len() != 4 || idx(0)? != boundary_edges.len() {
                return Err(bad(ln, "expected `index n1 n2 tag`"));
            }
            let tag = BoundaryTag::from_name(tok[3]).ok_or_else(|| bad(ln, "unknown tag"))?;
            boundary_edges.push(BoundaryEdge { nodes: [idx(1)?, idx(2)?], tag });
        } else {
            return Err(bad(ln, "trailing data after the declared counts"));
        }
    }
    if nodes.len() != nn || triangles.len() != nt || boundary_edges.len() != ne {
        return Err(bad(hl, "file is shorter than the declared counts"));
    }
    let mesh = Mesh { nodes, triangles, boundary_edges, cap };
    mesh.validate()?;
    Ok(mesh)
}

pub fn write_field(values: &[f64]) -> String {
    let mut s = String::from("index value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i} {v}");
    }
    s
}

pub fn read_field(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let parse_err = || Error::Parse {
            path: "<field>".into(),
            message: format!("line {}: expected `index value`", ln + 1),
        };
        let i: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(parse_err)?;
        let v: f64 = tok.next().and_then(|t| t.parse().ok()).ok_or_else(parse_err)?;
        if i != out.len() {
            return Err(parse_err());
        }
        out.push(v);
    }
    Ok(out)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
