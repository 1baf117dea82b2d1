//! ASCII PLY output with optional per-vertex scalar (color-mapped) and
//! 3-vector properties, for field visualization.

use std::io::Write;
use std::path::Path;

use super::IoError;
use crate::mesh::PolygonMesh;
use crate::Vec3;

/// Blue-white-red ramp over the symmetric range [−m, m], m = max |value|.
fn diverging_color(value: f64, max_abs: f64) -> [u8; 3] {
    if max_abs == 0.0 {
        return [255, 255, 255];
    }
    let t = (value / max_abs).clamp(-1.0, 1.0);
    let lerp = |a: f64, b: f64, s: f64| (a + (b - a) * s).round() as u8;
    if t < 0.0 {
        let s = 1.0 + t; // 0 at -1, 1 at 0
        [lerp(59.0, 255.0, s), lerp(76.0, 255.0, s), lerp(192.0, 255.0, s)]
    } else {
        [lerp(255.0, 180.0, t), lerp(255.0, 4.0, t), lerp(255.0, 38.0, t)]
    }
}

/// Write the mesh with optional per-vertex payloads. A scalar payload is
/// stored both as a `quality` float and as a color ramp; a vector payload as
/// `vx vy vz` floats.
pub fn write_ply(
    mesh: &PolygonMesh,
    scalar: Option<&[f64]>,
    vectors: Option<&[Vec3]>,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    if let Some(s) = scalar {
        assert_eq!(s.len(), mesh.num_vertices(), "scalar payload length");
    }
    if let Some(v) = vectors {
        assert_eq!(v.len(), mesh.num_vertices(), "vector payload length");
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", mesh.num_vertices())?;
    writeln!(out, "property double x")?;
    writeln!(out, "property double y")?;
    writeln!(out, "property double z")?;
    if scalar.is_some() {
        writeln!(out, "property double quality")?;
        writeln!(out, "property uchar red")?;
        writeln!(out, "property uchar green")?;
        writeln!(out, "property uchar blue")?;
    }
    if vectors.is_some() {
        writeln!(out, "property double vx")?;
        writeln!(out, "property double vy")?;
        writeln!(out, "property double vz")?;
    }
    writeln!(out, "element face {}", mesh.num_faces())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "end_header")?;
    let max_abs = scalar
        .map(|s| s.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .unwrap_or(0.0);
    for (i, p) in mesh.positions().iter().enumerate() {
        write!(out, "{} {} {}", p.x, p.y, p.z)?;
        if let Some(s) = scalar {
            let [r, g, b] = diverging_color(s[i], max_abs);
            write!(out, " {} {} {} {}", s[i], r, g, b)?;
        }
        if let Some(v) = vectors {
            write!(out, " {} {} {}", v[i].x, v[i].y, v[i].z)?;
        }
        writeln!(out)?;
    }
    for f in 0..mesh.num_faces() {
        write!(out, "{}", mesh.face_degree(f))?;
        for &v in mesh.face_vertices(f) {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
