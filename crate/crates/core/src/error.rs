use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible geometry: {0}")]
    Geometry(String),

    #[error("meshing failed: {0}")]
    Meshing(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate triangle {element}: signed area {area:e}")]
    DegenerateElement { element: usize, area: f64 },

    #[error("no boundary edges carry tag {0:?}")]
    UnknownTag(crate::mesh::BoundaryTag),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e}, target {tol:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    Indefinite { row: usize, pivot: f64 },

    #[error("point ({r:e}, {z:e}) lies outside the mesh")]
    OutsideDomain { r: f64, z: f64 },

    #[error("time grids do not match: {0}")]
    MismatchedSeries(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}
