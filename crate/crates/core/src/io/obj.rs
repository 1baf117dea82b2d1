//! Wavefront OBJ read/write with faces of arbitrary arity.
//!
//! Only `v` and `f` records are interpreted; `vn`/`vt`/`o`/`g`/`s`/comments
//! are skipped. Face corners may use the `v/vt/vn` syntax; the vertex index
//! (1-based, or negative for relative) is taken. Vertices are written with
//! Rust's shortest round-trip float formatting, which preserves all
//! significant digits.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{parse_error, IoError};
use crate::mesh::{build_mesh, PolygonMesh};
use crate::Vec3;

pub fn read_obj(path: impl AsRef<Path>) -> Result<PolygonMesh, IoError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut positions: Vec<Vec3> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in &mut coord {
                    let tok = parts
                        .next()
                        .ok_or_else(|| parse_error(path, lineno, "vertex needs 3 coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| parse_error(path, lineno, format!("bad coordinate {tok:?}")))?;
                }
                positions.push(Vec3::new(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in parts {
                    let head = tok.split('/').next().unwrap_or("");
                    let idx: i64 = head
                        .parse()
                        .map_err(|_| parse_error(path, lineno, format!("bad face index {tok:?}")))?;
                    let resolved = if idx > 0 {
                        (idx - 1) as usize
                    } else if idx < 0 {
                        let back = (-idx) as usize;
                        if back > positions.len() {
                            return Err(parse_error(path, lineno, format!("relative index {idx} out of range")));
                        }
                        positions.len() - back
                    } else {
                        return Err(parse_error(path, lineno, "face index 0 is invalid"));
                    };
                    face.push(resolved);
                }
                if face.len() < 3 {
                    return Err(parse_error(path, lineno, "face needs at least 3 vertices"));
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok(build_mesh(positions, faces)?)
}

pub fn write_obj(mesh: &PolygonMesh, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for p in mesh.positions() {
        writeln!(out, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for f in 0..mesh.num_faces() {
        write!(out, "f")?;
        for &v in mesh.face_vertices(f) {
            write!(out, " {}", v + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
