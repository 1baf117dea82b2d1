//! Polygonal surface meshes with oriented edges, per-face halfedge cycles,
//! and incidence signs.
//!
//! A [`PolygonMesh`] is immutable after construction: every operator is
//! assembled against a fixed snapshot, which keeps operator caches valid and
//! makes the whole structure safe to share across threads.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::Vec3;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("face {face} has fewer than 3 vertices or a repeated vertex")]
    DegenerateFace { face: usize },
    #[error("edge ({a},{b}) is shared by more than two faces")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("index {index} out of range ({what} count is {count})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        count: usize,
    },
    #[error("face {face} has vector area below the degeneracy threshold")]
    ZeroArea { face: usize },
    #[error("mesh has no edges")]
    EmptyEdgeSet,
}

/// Per-face geometric data derived from the vertex cycle.
#[derive(Debug, Clone)]
pub struct FaceGeometry {
    /// Vector area n̂ = ½ Σ vⱼ × vⱼ₊₁ (indices modulo the face degree).
    pub vector_area: Vec3,
    /// |f| = ‖n̂‖; coincides with the Euclidean area for planar faces.
    pub area: f64,
    /// Arithmetic mean of the face's vertices.
    pub centroid: Vec3,
    /// n̂ / ‖n̂‖, or zero when the face is degenerate.
    pub unit_normal: Vec3,
}

/// One face-oriented instance of an edge.
#[derive(Debug, Clone, Copy)]
pub struct Halfedge {
    /// Parent edge index.
    pub edge: usize,
    /// +1 when the halfedge runs along the parent edge's canonical
    /// orientation (lower to higher vertex index), −1 when opposed.
    pub sign: i8,
}

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

/// Manifold (with boundary) polygonal surface mesh.
#[derive(Debug, Clone)]
pub struct PolygonMesh {
    id: u64,
    positions: Vec<Vec3>,
    face_offsets: Vec<usize>,
    face_vertices: Vec<usize>,
    halfedges: Vec<Halfedge>,
    /// Canonical vertex pairs (lo, hi), lo < hi.
    edges: Vec<(usize, usize)>,
    /// Up to two incident halfedges (global halfedge ids) per edge.
    edge_halfedges: Vec<[Option<usize>; 2]>,
    vertex_face_offsets: Vec<usize>,
    vertex_face_list: Vec<usize>,
    geometry: Vec<FaceGeometry>,
    eps_area: f64,
}

/// Mean and minimum edge lengths.
#[derive(Debug, Clone, Copy)]
pub struct MeshSpacing {
    pub mean: f64,
    pub min: f64,
}

/// Validate a vertex/face soup and build the full incidence structure.
///
/// Edges are deduplicated with the canonical lower-to-higher orientation;
/// each face contributes one halfedge per boundary edge, carrying the
/// incidence sign of the face traversal against the canonical edge.
pub fn build_mesh(positions: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<PolygonMesh, MeshError> {
    let nv = positions.len();
    let mut face_offsets = Vec::with_capacity(faces.len() + 1);
    let mut face_vertices = Vec::new();
    face_offsets.push(0);
    for (fi, face) in faces.iter().enumerate() {
        if face.len() < 3 {
            return Err(MeshError::DegenerateFace { face: fi });
        }
        let mut seen = face.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(MeshError::DegenerateFace { face: fi });
        }
        for &v in face {
            if v >= nv {
                return Err(MeshError::IndexOutOfRange {
                    what: "vertex",
                    index: v,
                    count: nv,
                });
            }
            face_vertices.push(v);
        }
        face_offsets.push(face_vertices.len());
    }

    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_halfedges: Vec<[Option<usize>; 2]> = Vec::new();
    let mut halfedges = Vec::with_capacity(face_vertices.len());
    for fi in 0..faces.len() {
        let span = face_offsets[fi]..face_offsets[fi + 1];
        let verts = &face_vertices[span.clone()];
        let p = verts.len();
        for k in 0..p {
            let a = verts[k];
            let b = verts[(k + 1) % p];
            let key = (a.min(b), a.max(b));
            let eid = *edge_ids.entry(key).or_insert_with(|| {
                edges.push(key);
                edge_halfedges.push([None, None]);
                edges.len() - 1
            });
            let hid = span.start + k;
            let slot = &mut edge_halfedges[eid];
            if slot[0].is_none() {
                slot[0] = Some(hid);
            } else if slot[1].is_none() {
                slot[1] = Some(hid);
            } else {
                return Err(MeshError::NonManifoldEdge { a: key.0, b: key.1 });
            }
            halfedges.push(Halfedge {
                edge: eid,
                sign: if a < b { 1 } else { -1 },
            });
        }
    }

    let mut vertex_face_counts = vec![0usize; nv + 1];
    for fi in 0..faces.len() {
        for &v in &face_vertices[face_offsets[fi]..face_offsets[fi + 1]] {
            vertex_face_counts[v + 1] += 1;
        }
    }
    for i in 0..nv {
        vertex_face_counts[i + 1] += vertex_face_counts[i];
    }
    let vertex_face_offsets = vertex_face_counts.clone();
    let mut vertex_face_list = vec![0usize; face_vertices.len()];
    let mut cursor = vertex_face_counts;
    for fi in 0..faces.len() {
        for &v in &face_vertices[face_offsets[fi]..face_offsets[fi + 1]] {
            vertex_face_list[cursor[v]] = fi;
            cursor[v] += 1;
        }
    }

    let mut lo = Vec3::from_element(f64::INFINITY);
    let mut hi = Vec3::from_element(f64::NEG_INFINITY);
    for p in &positions {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let diag = if positions.is_empty() { 0.0 } else { (hi - lo).norm() };
    let eps_area = 1e-12 * diag * diag;

    let geometry = (0..faces.len())
        .map(|fi| compute_face_geometry(&positions, &face_vertices[face_offsets[fi]..face_offsets[fi + 1]]))
        .collect();

    Ok(PolygonMesh {
        id: NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed),
        positions,
        face_offsets,
        face_vertices,
        halfedges,
        edges,
        edge_halfedges,
        vertex_face_offsets,
        vertex_face_list,
        geometry,
        eps_area,
    })
}

fn compute_face_geometry(positions: &[Vec3], verts: &[usize]) -> FaceGeometry {
    let p = verts.len();
    let mut vector_area = Vec3::zeros();
    let mut centroid = Vec3::zeros();
    for j in 0..p {
        let vj = positions[verts[j]];
        let vj1 = positions[verts[(j + 1) % p]];
        vector_area += 0.5 * vj.cross(&vj1);
        centroid += vj;
    }
    centroid /= p as f64;
    let area = vector_area.norm();
    let unit_normal = if area > 0.0 { vector_area / area } else { Vec3::zeros() };
    FaceGeometry {
        vector_area,
        area,
        centroid,
        unit_normal,
    }
}

impl PolygonMesh {
    /// Unique identity of this immutable snapshot; operator caches key on it.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.face_offsets.len() - 1
    }

    pub fn num_halfedges(&self) -> usize {
        self.halfedges.len()
    }

    /// Number of cells of the given degree (0, 1, or 2).
    pub fn num_cells(&self, degree: usize) -> usize {
        match degree {
            0 => self.num_vertices(),
            1 => self.num_edges(),
            2 => self.num_faces(),
            _ => 0,
        }
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Vec3 {
        self.positions[v]
    }

    pub fn face_vertices(&self, face: usize) -> &[usize] {
        &self.face_vertices[self.face_offsets[face]..self.face_offsets[face + 1]]
    }

    pub fn face_degree(&self, face: usize) -> usize {
        self.face_offsets[face + 1] - self.face_offsets[face]
    }

    /// Global halfedge-id range of a face; halfedge `start + k` runs from the
    /// face's `k`-th listed vertex to the next one (cyclically).
    pub fn face_halfedge_range(&self, face: usize) -> std::ops::Range<usize> {
        self.face_offsets[face]..self.face_offsets[face + 1]
    }

    pub fn halfedge(&self, h: usize) -> Halfedge {
        self.halfedges[h]
    }

    /// Face owning a halfedge.
    pub fn halfedge_face(&self, h: usize) -> usize {
        match self.face_offsets.binary_search(&h) {
            Ok(f) => f,
            Err(f) => f - 1,
        }
    }

    /// Geometric vector of a halfedge (head − tail along the face cycle).
    pub fn halfedge_vector(&self, h: usize) -> Vec3 {
        let f = self.halfedge_face(h);
        let span = self.face_halfedge_range(f);
        let verts = self.face_vertices(f);
        let k = h - span.start;
        let a = verts[k];
        let b = verts[(k + 1) % verts.len()];
        self.positions[b] - self.positions[a]
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Canonical edge vector (lower-index vertex to higher-index vertex).
    pub fn edge_vector(&self, e: usize) -> Vec3 {
        let (a, b) = self.edges[e];
        self.positions[b] - self.positions[a]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_vector(e).norm()
    }

    pub fn edge_halfedges(&self, e: usize) -> [Option<usize>; 2] {
        self.edge_halfedges[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_halfedges[e][1].is_none()
    }

    /// Vertex not touching any boundary edge.
    pub fn is_interior_vertex(&self, v: usize) -> bool {
        !(0..self.num_edges()).any(|e| {
            let (a, b) = self.edges[e];
            (a == v || b == v) && self.is_boundary_edge(e)
        })
    }

    /// Faces adjacent to a vertex, in ascending face order.
    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_face_list[self.vertex_face_offsets[v]..self.vertex_face_offsets[v + 1]]
    }

    /// Incidence sign [f:e]: +1 when the canonical edge orientation agrees
    /// with the face traversal, −1 when opposed, 0 when not incident.
    pub fn incidence(&self, face: usize, edge: usize) -> Result<i32, MeshError> {
        if face >= self.num_faces() {
            return Err(MeshError::IndexOutOfRange {
                what: "face",
                index: face,
                count: self.num_faces(),
            });
        }
        if edge >= self.num_edges() {
            return Err(MeshError::IndexOutOfRange {
                what: "edge",
                index: edge,
                count: self.num_edges(),
            });
        }
        for h in self.face_halfedge_range(face) {
            if self.halfedges[h].edge == edge {
                return Ok(self.halfedges[h].sign as i32);
            }
        }
        Ok(0)
    }

    /// Degeneracy threshold: 1e−12 × (bounding-box diagonal)².
    pub fn eps_area(&self) -> f64 {
        self.eps_area
    }

    pub fn face_geometry(&self, face: usize) -> Result<&FaceGeometry, MeshError> {
        if face >= self.num_faces() {
            return Err(MeshError::IndexOutOfRange {
                what: "face",
                index: face,
                count: self.num_faces(),
            });
        }
        let g = &self.geometry[face];
        if g.area < self.eps_area {
            return Err(MeshError::ZeroArea { face });
        }
        Ok(g)
    }

    /// Geometry record without the degeneracy check.
    pub fn face_geometry_raw(&self, face: usize) -> &FaceGeometry {
        &self.geometry[face]
    }

    /// Indices of faces whose vector area is below the threshold.
    pub fn degenerate_faces(&self) -> Vec<usize> {
        (0..self.num_faces())
            .filter(|&f| self.geometry[f].area < self.eps_area)
            .collect()
    }

    /// Mean (and minimum) edge length.
    pub fn spacing(&self) -> Result<MeshSpacing, MeshError> {
        if self.edges.is_empty() {
            return Err(MeshError::EmptyEdgeSet);
        }
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        for e in 0..self.edges.len() {
            let l = self.edge_length(e);
            sum += l;
            min = min.min(l);
        }
        Ok(MeshSpacing {
            mean: sum / self.edges.len() as f64,
            min,
        })
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    /// Copy of the face table, for rebuilds and file output.
    pub fn face_table(&self) -> Vec<Vec<usize>> {
        (0..self.num_faces()).map(|f| self.face_vertices(f).to_vec()).collect()
    }

    /// Cells untouched by the boundary: a vertex passes when it lies on no
    /// boundary edge; an edge or face passes when all its vertices do.
    pub fn interior_cell_mask(&self, degree: usize) -> Vec<bool> {
        let mut vertex_interior = vec![true; self.num_vertices()];
        for e in 0..self.num_edges() {
            if self.is_boundary_edge(e) {
                let (a, b) = self.edge(e);
                vertex_interior[a] = false;
                vertex_interior[b] = false;
            }
        }
        match degree {
            0 => vertex_interior,
            1 => (0..self.num_edges())
                .map(|e| {
                    let (a, b) = self.edge(e);
                    vertex_interior[a] && vertex_interior[b]
                })
                .collect(),
            _ => (0..self.num_faces())
                .map(|f| self.face_vertices(f).iter().all(|&v| vertex_interior[v]))
                .collect(),
        }
    }
}

/// Mean edge length; errors on an empty edge set.
pub fn mesh_spacing(mesh: &PolygonMesh) -> Result<MeshSpacing, MeshError> {
    mesh.spacing()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    pub(crate) fn unit_square() -> PolygonMesh {
        build_mesh(
            vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.), v(0., 1., 0.)],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn single_quad_counts_and_signs() {
        let m = unit_square();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_edges(), 4);
        assert_eq!(m.num_faces(), 1);
        // traversal 0→1→2→3→0; edge (0,3) is traversed against canonical order
        let signs: Vec<i8> = (0..4).map(|h| m.halfedge(h).sign).collect();
        assert_eq!(signs, vec![1, 1, 1, -1]);
    }

    #[test]
    fn shared_edge_has_opposite_halfedge_signs() {
        let m = build_mesh(
            vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.), v(0., 1., 0.)],
            vec![vec![0, 1, 2], vec![0, 2, 3]],
        )
        .unwrap();
        let shared = (0..m.num_edges()).find(|&e| m.edge(e) == (0, 2)).unwrap();
        let [h0, h1] = m.edge_halfedges(shared);
        let s0 = m.halfedge(h0.unwrap()).sign;
        let s1 = m.halfedge(h1.unwrap()).sign;
        assert_eq!(s0 + s1, 0);
    }

    #[test]
    fn repeated_vertex_is_degenerate() {
        let err = build_mesh(
            vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.)],
            vec![vec![0, 1, 1, 2]],
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::DegenerateFace { face: 0 }));
    }

    #[test]
    fn out_of_range_vertex_is_rejected() {
        let err = build_mesh(vec![v(0., 0., 0.), v(1., 0., 0.)], vec![vec![0, 1, 5]]).unwrap_err();
        assert!(matches!(err, MeshError::IndexOutOfRange { .. }));
    }

    #[test]
    fn three_faces_on_an_edge_is_non_manifold() {
        let err = build_mesh(
            vec![
                v(0., 0., 0.),
                v(1., 0., 0.),
                v(0., 1., 0.),
                v(0., 0., 1.),
                v(0., -1., 0.),
            ],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]],
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::NonManifoldEdge { a: 0, b: 1 }));
    }

    #[test]
    fn pentagon_incidence_signs() {
        // f = (0,1,2,3,4): edges (0,1),(1,2),(2,3),(3,4) run with the
        // traversal, edge (0,4) against it, so ∂f = e0+e1+e2+e3−e4.
        let m = build_mesh(
            vec![
                v(0., 0., 0.),
                v(2., 0., 0.),
                v(3., 2., 0.),
                v(1., 3., 0.),
                v(-1., 2., 0.),
            ],
            vec![vec![0, 1, 2, 3, 4]],
        )
        .unwrap();
        let signs: Vec<i32> = (0..5).map(|e| m.incidence(0, e).unwrap()).collect();
        assert_eq!(signs, vec![1, 1, 1, 1, -1]);
    }

    #[test]
    fn incidence_zero_for_non_incident_edge() {
        let m = build_mesh(
            vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.), v(0., 1., 0.)],
            vec![vec![0, 1, 2], vec![0, 2, 3]],
        )
        .unwrap();
        let e01 = (0..m.num_edges()).find(|&e| m.edge(e) == (0, 1)).unwrap();
        assert_eq!(m.incidence(1, e01).unwrap(), 0);
    }

    #[test]
    fn reversing_a_face_flips_all_signs() {
        let faces = vec![vec![0usize, 1, 2, 3, 4]];
        let pos = vec![
            v(0., 0., 0.),
            v(2., 0., 0.),
            v(3., 2., 0.),
            v(1., 3., 0.),
            v(-1., 2., 0.),
        ];
        let fwd = build_mesh(pos.clone(), faces.clone()).unwrap();
        let rev = build_mesh(pos, vec![faces[0].iter().rev().copied().collect()]).unwrap();
        for e in 0..fwd.num_edges() {
            let (a, b) = fwd.edge(e);
            let er = (0..rev.num_edges()).find(|&k| rev.edge(k) == (a, b)).unwrap();
            assert_eq!(fwd.incidence(0, e).unwrap(), -rev.incidence(0, er).unwrap());
        }
    }

    #[test]
    fn unit_square_geometry() {
        let m = unit_square();
        let g = m.face_geometry(0).unwrap();
        assert!((g.vector_area - v(0., 0., 1.)).norm() < 1e-15);
        assert!((g.area - 1.0).abs() < 1e-15);
        assert!((g.centroid - v(0.5, 0.5, 0.)).norm() < 1e-15);
        assert!((g.unit_normal - v(0., 0., 1.)).norm() < 1e-15);
    }

    #[test]
    fn clockwise_square_flips_normal() {
        let m = build_mesh(
            vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.), v(0., 1., 0.)],
            vec![vec![3, 2, 1, 0]],
        )
        .unwrap();
        let g = m.face_geometry(0).unwrap();
        assert!((g.vector_area - v(0., 0., -1.)).norm() < 1e-15);
    }

    #[test]
    fn nonplanar_quad_vector_area_hand_value() {
        // ½ [ v0×v1 + v1×v2 + v2×v3 + v3×v0 ] with
        // v0=(0,0,0), v1=(1,0,0), v2=(1,1,1), v3=(0,1,0):
        //   v1×v2 = (0,−1,1), v2×v3 = (−1,0,1), others zero
        //   n̂ = ½(−1,−1,2)
        let m = build_mesh(
            vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 1.), v(0., 1., 0.)],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        let g = m.face_geometry(0).unwrap();
        assert!((g.vector_area - v(-0.5, -0.5, 1.0)).norm() < 1e-15);
        assert!((g.area - (1.5f64).sqrt()).abs() < 1e-15);
        assert!((g.centroid - v(0.5, 0.5, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn vector_area_is_translation_invariant() {
        let pos = vec![v(0.2, 0., 0.1), v(1., 0.3, 0.), v(1.4, 1., -0.2), v(0., 1.2, 0.4)];
        let shift = v(3.1, -2.7, 5.5);
        let m0 = build_mesh(pos.clone(), vec![vec![0, 1, 2, 3]]).unwrap();
        let m1 = build_mesh(pos.iter().map(|p| p + shift).collect(), vec![vec![0, 1, 2, 3]]).unwrap();
        let d = m0.face_geometry(0).unwrap().vector_area - m1.face_geometry(0).unwrap().vector_area;
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn zero_area_face_is_flagged() {
        let m = build_mesh(
            vec![v(0., 0., 0.), v(1., 0., 0.), v(2., 0., 0.), v(3., 0., 0.)],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        assert!(matches!(m.face_geometry(0), Err(MeshError::ZeroArea { face: 0 })));
        assert_eq!(m.degenerate_faces(), vec![0]);
    }

    #[test]
    fn spacing_of_unit_square() {
        let m = unit_square();
        let s = m.spacing().unwrap();
        assert!((s.mean - 1.0).abs() < 1e-15);
        assert!((s.min - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_operator_squares_to_zero() {
        // Σ_e [f:e]·∂e = 0 per face, with ∂e = head − tail as vertex signs.
        let m = build_mesh(
            vec![
                v(0., 0., 0.),
                v(2., 0., 0.),
                v(3., 2., 0.),
                v(1., 3., 0.),
                v(-1., 2., 0.),
                v(4., 1., 0.),
            ],
            vec![vec![0, 1, 2, 3, 4], vec![1, 5, 2]],
        )
        .unwrap();
        for f in 0..m.num_faces() {
            let mut vertex_signs = vec![0i64; m.num_vertices()];
            for e in 0..m.num_edges() {
                let s = m.incidence(f, e).unwrap() as i64;
                if s != 0 {
                    let (lo, hi) = m.edge(e);
                    vertex_signs[hi] += s;
                    vertex_signs[lo] -= s;
                }
            }
            assert!(vertex_signs.iter().all(|&s| s == 0));
        }
    }
}
