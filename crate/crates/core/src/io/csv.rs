//! CSV serialization of cochains (`cell_index,value`) and vertex vector
//! fields (`vertex_index,vx,vy,vz`).

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{parse_error, IoError};
use crate::cochain::{Cochain, VertexVectorField};
use crate::mesh::PolygonMesh;

pub fn write_cochain(c: &Cochain, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "cell_index,value")?;
    for (i, v) in c.values().iter().enumerate() {
        writeln!(out, "{i},{v}")?;
    }
    Ok(())
}

/// Read a cochain of the given degree; the header line is optional, rows may
/// appear in any order, and every cell must be covered exactly once.
pub fn read_cochain(mesh: &PolygonMesh, degree: usize, path: impl AsRef<Path>) -> Result<Cochain, IoError> {
    let path = path.as_ref();
    let n = mesh.num_cells(degree);
    let mut values = vec![f64::NAN; n];
    let reader = BufReader::new(std::fs::File::open(path)?);
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("cell_index") {
            continue;
        }
        let mut parts = line.split(',');
        let idx: usize = parts
            .next()
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| parse_error(path, lineno, "bad cell index"))?;
        let val: f64 = parts
            .next()
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| parse_error(path, lineno, "bad value"))?;
        if idx >= n {
            return Err(parse_error(path, lineno, format!("cell index {idx} out of range (count {n})")));
        }
        values[idx] = val;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(parse_error(path, 0, format!("file does not cover all {n} cells")));
    }
    Ok(Cochain::from_values(mesh, degree, values)?)
}

pub fn write_vector_field(field: &VertexVectorField, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "vertex_index,vx,vy,vz")?;
    for (i, v) in field.vectors.iter().enumerate() {
        writeln!(out, "{i},{},{},{}", v.x, v.y, v.z)?;
    }
    Ok(())
}
