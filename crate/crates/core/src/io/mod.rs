//! File formats: OBJ meshes (polygonal faces), PLY meshes with per-vertex
//! scalar/vector payloads, CSV cochains and vertex vector fields, and Matrix
//! Market operator export.

pub mod csv;
pub mod mtx;
pub mod obj;
pub mod ply;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Cochain(#[from] crate::cochain::CochainError),
}

fn parse_error(path: &std::path::Path, line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}
