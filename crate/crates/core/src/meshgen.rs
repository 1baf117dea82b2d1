//! Mesh generation over the analytic surfaces: regular refinement ladders,
//! tangent jittering, and unstructured (edge-eliminated) polygonal meshes.
//!
//! All generators are deterministic functions of their inputs and seed; the
//! RNG is ChaCha8 seeded per call.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mesh::{build_mesh, MeshError, PolygonMesh};
use crate::surface::AnalyticSurface;
use crate::Vec3;

#[derive(Debug, Error)]
pub enum MeshGenError {
    #[error("resolution must be at least 2, got {0}")]
    ResolutionTooSmall(usize),
    #[error("jitter radius must be nonnegative, got {0}")]
    NegativeJitterRadius(f64),
    #[error("jitter collapsed face {face} below the degeneracy threshold")]
    JitterCollapse { face: usize },
    #[error("elimination fraction must be in [0, 1), got {0}")]
    InvalidFraction(f64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Sphere meshing scheme for [`gen_regular_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SphereScheme {
    /// Quadrilateralized cube (6 n² quads) projected radially. Structured
    /// parallelogram-like quads; several operators superconverge on it.
    #[default]
    Cube,
    /// Hex-dominant geodesic mesh: the dual of an n-fold subdivided
    /// icosahedron (10 n² + 2 polygons, twelve of them pentagons). Behaves
    /// like a generic regular polygonal mesh.
    Hex,
}

/// Regular mesh on the surface.
///
/// * plane: n×n quad grid on [−1, 1]²;
/// * sphere: quadrilateralized cube (6 n² quads) projected radially;
/// * torus: n×n quad grid in (major, minor) angles.
pub fn gen_regular(surface: AnalyticSurface, resolution: usize) -> Result<PolygonMesh, MeshGenError> {
    gen_regular_with(surface, SphereScheme::Cube, resolution)
}

/// [`gen_regular`] with an explicit sphere meshing scheme (ignored for the
/// plane and torus).
pub fn gen_regular_with(
    surface: AnalyticSurface,
    sphere_scheme: SphereScheme,
    resolution: usize,
) -> Result<PolygonMesh, MeshGenError> {
    if surface == AnalyticSurface::Sphere && sphere_scheme == SphereScheme::Hex {
        return gen_hex_sphere(resolution);
    }
    gen_regular_inner(surface, resolution)
}

fn gen_regular_inner(surface: AnalyticSurface, resolution: usize) -> Result<PolygonMesh, MeshGenError> {
    if resolution < 2 {
        return Err(MeshGenError::ResolutionTooSmall(resolution));
    }
    let n = resolution;
    match surface {
        AnalyticSurface::Plane => {
            let mut positions = Vec::with_capacity((n + 1) * (n + 1));
            for i in 0..=n {
                for j in 0..=n {
                    positions.push(Vec3::new(
                        -1.0 + 2.0 * i as f64 / n as f64,
                        -1.0 + 2.0 * j as f64 / n as f64,
                        0.0,
                    ));
                }
            }
            let idx = |i: usize, j: usize| i * (n + 1) + j;
            let mut faces = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    // counterclockwise as seen from +z
                    faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                }
            }
            Ok(build_mesh(positions, faces)?)
        }
        AnalyticSurface::Sphere => {
            // Cube faces are parameterized by integer (u, v) grids so that
            // shared cube edges deduplicate exactly by integer key.
            let ni = n as i64;
            let mut vertex_ids: HashMap<(i64, i64, i64), usize> = HashMap::new();
            let mut positions: Vec<Vec3> = Vec::new();
            let mut faces: Vec<Vec<usize>> = Vec::new();
            // (point builder) per cube side, with (u, v) right-handed about
            // the outward normal so every quad is CCW seen from outside
            let sides: [&dyn Fn(i64, i64) -> (i64, i64, i64); 6] = [
                &|a, b| (ni, a, b),   // +x: u=y, v=z
                &|a, b| (-ni, b, a),  // -x: u=z, v=y
                &|a, b| (b, ni, a),   // +y: u=z, v=x
                &|a, b| (a, -ni, b),  // -y: u=x, v=z
                &|a, b| (a, b, ni),   // +z: u=x, v=y
                &|a, b| (b, a, -ni),  // -z: u=y, v=x
            ];
            for side in sides {
                let mut grid = vec![vec![0usize; n + 1]; n + 1];
                for i in 0..=n {
                    for j in 0..=n {
                        let key = side(2 * i as i64 - ni, 2 * j as i64 - ni);
                        let id = *vertex_ids.entry(key).or_insert_with(|| {
                            let p = Vec3::new(key.0 as f64, key.1 as f64, key.2 as f64) / ni as f64;
                            positions.push(p.normalize());
                            positions.len() - 1
                        });
                        grid[i][j] = id;
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        faces.push(vec![grid[i][j], grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]]);
                    }
                }
            }
            Ok(build_mesh(positions, faces)?)
        }
        AnalyticSurface::Torus { major, minor } => {
            let tau = 2.0 * std::f64::consts::PI;
            let mut positions = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let theta = tau * i as f64 / n as f64;
                    let psi = tau * j as f64 / n as f64;
                    let rho = major + minor * psi.cos();
                    positions.push(Vec3::new(rho * theta.cos(), rho * theta.sin(), minor * psi.sin()));
                }
            }
            let idx = |i: usize, j: usize| (i % n) * n + (j % n);
            let mut faces = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    // (θ, ψ) order is CCW with respect to the outward normal
                    faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                }
            }
            Ok(build_mesh(positions, faces)?)
        }
    }
}

fn icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let verts: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (verts, faces)
}

/// Hex-dominant geodesic sphere: subdivide each icosahedron face n²-fold,
/// project to the sphere, and dualize (one polygon per subdivision vertex,
/// with corners at the projected triangle centroids).
pub fn gen_hex_sphere(resolution: usize) -> Result<PolygonMesh, MeshGenError> {
    if resolution < 2 {
        return Err(MeshGenError::ResolutionTooSmall(resolution));
    }
    let n = resolution;
    let (base_v, base_f) = icosahedron();
    let mut verts: Vec<Vec3> = Vec::new();
    let mut pos_id: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let mut add_vertex = |p: Vec3, verts: &mut Vec<Vec3>| -> usize {
        // subdivision points on shared icosahedron edges coincide exactly up
        // to rounding; quantize well below any edge length to deduplicate
        let q = (
            (p.x * 1e12).round() as i64,
            (p.y * 1e12).round() as i64,
            (p.z * 1e12).round() as i64,
        );
        *pos_id.entry(q).or_insert_with(|| {
            verts.push(p);
            verts.len() - 1
        })
    };
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for f in &base_f {
        let (a, b, c) = (base_v[f[0]], base_v[f[1]], base_v[f[2]]);
        let mut grid: Vec<Vec<usize>> = Vec::new();
        for i in 0..=n {
            let mut row = Vec::new();
            for j in 0..=(n - i) {
                let u = i as f64 / n as f64;
                let v = j as f64 / n as f64;
                let p = (a * (1.0 - u - v) + b * u + c * v).normalize();
                row.push(add_vertex(p, &mut verts));
            }
            grid.push(row);
        }
        for i in 0..n {
            for j in 0..(n - i) {
                tris.push([grid[i][j], grid[i + 1][j], grid[i][j + 1]]);
                if j < n - i - 1 {
                    tris.push([grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]]);
                }
            }
        }
    }
    let centroids: Vec<Vec3> = tris
        .iter()
        .map(|t| ((verts[t[0]] + verts[t[1]] + verts[t[2]]) / 3.0).normalize())
        .collect();
    let mut vertex_tris: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (ti, t) in tris.iter().enumerate() {
        for &v in t {
            vertex_tris[v].push(ti);
        }
    }
    // one dual polygon per subdivision vertex: walk the triangle fan so that
    // consecutive corners share an edge through the vertex
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for (v, ts) in vertex_tris.iter().enumerate() {
        let mut ordered = vec![ts[0]];
        while ordered.len() < ts.len() {
            let last = tris[*ordered.last().unwrap()];
            let k = last.iter().position(|&u| u == v).unwrap();
            let hinge = last[(k + 1) % 3];
            let next = ts.iter().copied().find(|&c| {
                !ordered.contains(&c) && {
                    let t = tris[c];
                    let kk = t.iter().position(|&u| u == v).unwrap();
                    t[(kk + 2) % 3] == hinge
                }
            });
            match next {
                Some(c) => ordered.push(c),
                None => {
                    return Err(MeshGenError::Mesh(MeshError::NonManifoldEdge { a: v, b: hinge }))
                }
            }
        }
        faces.push(ordered);
    }
    let mesh = build_mesh(centroids, faces)?;
    // fans inherit one global chirality; flip everything if it came out inward
    let g = mesh.face_geometry_raw(0);
    if g.unit_normal.dot(&g.centroid) < 0.0 {
        let flipped = mesh
            .face_table()
            .into_iter()
            .map(|f| f.into_iter().rev().collect())
            .collect();
        return Ok(build_mesh(mesh.positions().to_vec(), flipped)?);
    }
    Ok(mesh)
}

/// Displace every vertex by `r · |e|_min` in a uniformly random tangent
/// direction and project back to the surface. `|e|_min` is the shortest edge
/// of the *input* mesh, fixed before any displacement.
pub fn jitter(
    mesh: &PolygonMesh,
    surface: AnalyticSurface,
    r: f64,
    seed: u64,
) -> Result<PolygonMesh, MeshGenError> {
    if r < 0.0 {
        return Err(MeshGenError::NegativeJitterRadius(r));
    }
    if r == 0.0 {
        return Ok(mesh.clone());
    }
    let step = r * mesh.spacing()?.min;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let positions: Vec<Vec3> = mesh
        .positions()
        .iter()
        .map(|&p| {
            let (t1, t2) = surface.tangent_basis(p);
            let phi: f64 = rng.gen_range(0.0..tau);
            surface.project(p + step * (phi.cos() * t1 + phi.sin() * t2))
        })
        .collect();
    let jittered = build_mesh(positions, mesh.face_table())?;
    if let Some(&face) = jittered.degenerate_faces().first() {
        return Err(MeshGenError::JitterCollapse { face });
    }
    Ok(jittered)
}

/// Merge faces across randomly chosen interior edges.
///
/// Interior edges are visited once in a seeded random order; an edge is
/// removed (its two faces merged into one polygon) only when the faces are
/// distinct and the merged boundary is a simple cycle. The pass stops after
/// `round(fraction · |E|)` removals or when the candidates are exhausted.
/// Returns the new mesh and the number of edges actually removed.
pub fn unstructure(
    mesh: &PolygonMesh,
    fraction: f64,
    seed: u64,
) -> Result<(PolygonMesh, usize), MeshGenError> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(MeshGenError::InvalidFraction(fraction));
    }
    let target = (fraction * mesh.num_edges() as f64).round() as usize;
    if target == 0 {
        return Ok((mesh.clone(), 0));
    }

    let mut faces: Vec<Option<Vec<usize>>> = mesh.face_table().into_iter().map(Some).collect();
    let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for f in 0..mesh.num_faces() {
        let verts = mesh.face_vertices(f);
        for k in 0..verts.len() {
            let a = verts[k];
            let b = verts[(k + 1) % verts.len()];
            edge_faces.entry((a.min(b), a.max(b))).or_default().push(f);
        }
    }

    let mut candidates: Vec<(usize, usize)> = (0..mesh.num_edges())
        .filter(|&e| !mesh.is_boundary_edge(e))
        .map(|e| mesh.edge(e))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);

    let mut removed = 0usize;
    for key in candidates {
        if removed >= target {
            break;
        }
        let incident = match edge_faces.get(&key) {
            Some(fs) if fs.len() == 2 && fs[0] != fs[1] => fs.clone(),
            _ => continue,
        };
        let (fa, fb) = (incident[0], incident[1]);
        let (ca, cb) = match (&faces[fa], &faces[fb]) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => continue,
        };
        let merged = match splice_cycles(&ca, &cb, key) {
            Some(m) => m,
            None => continue,
        };
        // commit: fa becomes the merged polygon, fb dies
        for k in 0..cb.len() {
            let a = cb[k];
            let b = cb[(k + 1) % cb.len()];
            let ekey = (a.min(b), a.max(b));
            if ekey == key {
                continue;
            }
            if let Some(fs) = edge_faces.get_mut(&ekey) {
                for f in fs.iter_mut() {
                    if *f == fb {
                        *f = fa;
                    }
                }
            }
        }
        edge_faces.remove(&key);
        faces[fa] = Some(merged);
        faces[fb] = None;
        removed += 1;
    }

    let alive: Vec<Vec<usize>> = faces.into_iter().flatten().collect();
    let rebuilt = build_mesh(mesh.positions().to_vec(), alive)?;
    Ok((rebuilt, removed))
}

/// Join two face cycles across a shared edge; `None` when the merge is
/// illegal (edge not traversed oppositely, or the result is not simple).
fn splice_cycles(ca: &[usize], cb: &[usize], key: (usize, usize)) -> Option<Vec<usize>> {
    // locate the shared edge in each cycle and its direction
    let dir_in = |cycle: &[usize]| -> Option<(usize, bool)> {
        let p = cycle.len();
        for k in 0..p {
            let a = cycle[k];
            let b = cycle[(k + 1) % p];
            if (a.min(b), a.max(b)) == key {
                return Some((k, a == key.0));
            }
        }
        None
    };
    let (ka, fwd_a) = dir_in(ca)?;
    let (kb, fwd_b) = dir_in(cb)?;
    // consistent orientation traverses the edge in opposite directions
    if fwd_a == fwd_b {
        return None;
    }
    // rotate each cycle to start at the head of its shared halfedge; each
    // rotated cycle then ends at the halfedge's tail
    let rot = |cycle: &[usize], start: usize| -> Vec<usize> {
        let p = cycle.len();
        (0..p).map(|i| cycle[(start + i) % p]).collect()
    };
    let list_a = rot(ca, (ka + 1) % ca.len());
    let list_b = rot(cb, (kb + 1) % cb.len());
    let mut merged = list_a;
    merged.extend_from_slice(&list_b[1..list_b.len() - 1]);
    // simple-cycle check: no repeated vertices
    let mut sorted = merged.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(merged)
}

/// How a refinement ladder perturbs each regular level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshProtocol {
    Regular,
    /// Tangent displacement by `r · |e|_min`, re-projected to the surface.
    Jitter { r: f64 },
    /// Random interior-edge elimination of the given fraction of edges.
    Unstructure { fraction: f64 },
}

/// Ordered meshes over one surface with strictly decreasing spacing.
#[derive(Debug)]
pub struct RefinementSequence {
    pub surface: AnalyticSurface,
    pub protocol: MeshProtocol,
    pub resolutions: Vec<usize>,
    pub seed: u64,
    pub meshes: Vec<PolygonMesh>,
}

/// Build one mesh per resolution, each level generated independently from
/// its regular mesh (jitter/unstructure seeds derive from `seed` and the
/// level index).
pub fn refinement_sequence(
    surface: AnalyticSurface,
    protocol: MeshProtocol,
    resolutions: &[usize],
    seed: u64,
) -> Result<RefinementSequence, MeshGenError> {
    refinement_sequence_with(surface, SphereScheme::Cube, protocol, resolutions, seed)
}

/// [`refinement_sequence`] with an explicit sphere meshing scheme.
pub fn refinement_sequence_with(
    surface: AnalyticSurface,
    sphere_scheme: SphereScheme,
    protocol: MeshProtocol,
    resolutions: &[usize],
    seed: u64,
) -> Result<RefinementSequence, MeshGenError> {
    let mut meshes = Vec::with_capacity(resolutions.len());
    let mut last_h = f64::INFINITY;
    for (level, &res) in resolutions.iter().enumerate() {
        let level_seed = seed.wrapping_add(level as u64);
        let regular = gen_regular_with(surface, sphere_scheme, res)?;
        let mesh = match protocol {
            MeshProtocol::Regular => regular,
            MeshProtocol::Jitter { r } => jitter(&regular, surface, r, level_seed)?,
            MeshProtocol::Unstructure { fraction } => unstructure(&regular, fraction, level_seed)?.0,
        };
        let h = mesh.spacing()?.mean;
        assert!(h < last_h, "refinement ladder must strictly decrease spacing");
        last_h = h;
        meshes.push(mesh);
    }
    Ok(RefinementSequence {
        surface,
        protocol,
        resolutions: resolutions.to_vec(),
        seed,
        meshes,
    })
}
