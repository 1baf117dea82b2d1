//! Discrete differential forms (cochains), their construction from analytic
//! fields by integration, the flat and sharp operators, and error norms.

use thiserror::Error;

use crate::fields::{AnalyticField, VectorFn};
use crate::mesh::{MeshError, PolygonMesh};
use crate::quadrature::{gauss_legendre_01, triangle_rule, QuadratureError};
use crate::Vec3;

#[derive(Debug, Error)]
pub enum CochainError {
    #[error("cochain degree {got} does not match expected degree {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("field kind {kind} cannot be discretized to degree {degree}")]
    FieldKindMismatch { kind: &'static str, degree: usize },
    #[error("cochain belongs to a different mesh")]
    MeshMismatch,
    #[error("cochain length {got} does not match cell count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cochain contains a non-finite value")]
    NonFiniteValue,
    #[error("vertex {0} has no adjacent faces")]
    IsolatedVertex(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Quadrature configuration for discretization. Edges use Gauss–Legendre of
/// the given order; faces use a symmetric rule of the given degree on the
/// centroid-fan triangles.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub edge_order: usize,
    pub triangle_degree: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            edge_order: 4,
            triangle_degree: 4,
        }
    }
}

/// A discrete k-form: one real value per k-cell of a fixed mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    degree: usize,
    mesh_id: u64,
    values: Vec<f64>,
}

impl Cochain {
    pub fn zeros(mesh: &PolygonMesh, degree: usize) -> Self {
        Self {
            degree,
            mesh_id: mesh.id(),
            values: vec![0.0; mesh.num_cells(degree)],
        }
    }

    pub fn from_values(mesh: &PolygonMesh, degree: usize, values: Vec<f64>) -> Result<Self, CochainError> {
        let expected = mesh.num_cells(degree);
        if values.len() != expected {
            return Err(CochainError::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CochainError::NonFiniteValue);
        }
        Ok(Self {
            degree,
            mesh_id: mesh.id(),
            values,
        })
    }

    /// Wrap values produced by an operator application (already sized).
    pub(crate) fn from_raw(degree: usize, mesh_id: u64, values: Vec<f64>) -> Self {
        Self {
            degree,
            mesh_id,
            values,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_compatible(&self, other: &Cochain) -> Result<(), CochainError> {
        if self.mesh_id != other.mesh_id {
            return Err(CochainError::MeshMismatch);
        }
        if self.degree != other.degree {
            return Err(CochainError::DegreeMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(())
    }

    /// self + scale · other.
    pub fn add_scaled(&self, other: &Cochain, scale: f64) -> Result<Cochain, CochainError> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Cochain {
            degree: self.degree,
            mesh_id: self.mesh_id,
            values,
        })
    }

    pub fn scale(&self, s: f64) -> Cochain {
        Cochain {
            degree: self.degree,
            mesh_id: self.mesh_id,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

impl std::ops::Index<usize> for Cochain {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// One 3-vector per vertex; the output of the sharp operator.
#[derive(Debug, Clone)]
pub struct VertexVectorField {
    pub mesh_id: u64,
    pub vectors: Vec<Vec3>,
}

/// Integrate an analytic field over the k-cells of the mesh.
///
/// * degree 0 — pointwise evaluation at vertices;
/// * degree 1 — Gauss–Legendre line integral along each canonical edge;
/// * degree 2 — sum over the centroid-fan triangles (C, vᵢ, vᵢ₊₁) of each
///   face with a symmetric triangle rule.
pub fn discretize(
    field: &AnalyticField,
    mesh: &PolygonMesh,
    degree: usize,
    quad: &QuadratureSpec,
) -> Result<Cochain, CochainError> {
    match (field, degree) {
        (AnalyticField::Scalar(a), 0) => {
            let values = mesh.positions().iter().map(|&p| a(p)).collect();
            Cochain::from_values(mesh, 0, values)
        }
        (AnalyticField::Covector(b), 1) => {
            let rule = gauss_legendre_01(quad.edge_order)?;
            let values = (0..mesh.num_edges())
                .map(|e| {
                    let (lo, hi) = mesh.edge(e);
                    let p0 = mesh.position(lo);
                    let dir = mesh.position(hi) - p0;
                    rule.iter().map(|&(t, w)| w * b(p0 + t * dir).dot(&dir)).sum()
                })
                .collect();
            Cochain::from_values(mesh, 1, values)
        }
        (AnalyticField::TwoForm(w), 2) => {
            let rule = triangle_rule(quad.triangle_degree)?;
            let values = (0..mesh.num_faces())
                .map(|f| {
                    let verts = mesh.face_vertices(f);
                    let p = verts.len();
                    let c = mesh.face_geometry_raw(f).centroid;
                    let mut total = 0.0;
                    for i in 0..p {
                        let a = mesh.position(verts[i]);
                        let b = mesh.position(verts[(i + 1) % p]);
                        // ∫_T ω = ½ Σ w_q ⟨proxy(x_q), (a−C) × (b−C)⟩
                        let cross = (a - c).cross(&(b - c));
                        for &(bary, wt) in &rule {
                            let x = bary[0] * c + bary[1] * a + bary[2] * b;
                            total += 0.5 * wt * w(x).dot(&cross);
                        }
                    }
                    total
                })
                .collect();
            Cochain::from_values(mesh, 2, values)
        }
        _ => Err(CochainError::FieldKindMismatch {
            kind: field.kind_name(),
            degree,
        }),
    }
}

/// Discrete flat: X♭(e) = ∫₀¹ ⟨e′(t), X(e(t))⟩ dt over each canonical edge.
pub fn flat(x: &VectorFn, mesh: &PolygonMesh, quad: &QuadratureSpec) -> Result<Cochain, CochainError> {
    let rule = gauss_legendre_01(quad.edge_order)?;
    let values = (0..mesh.num_edges())
        .map(|e| {
            let (lo, hi) = mesh.edge(e);
            let p0 = mesh.position(lo);
            let dir = mesh.position(hi) - p0;
            rule.iter().map(|&(t, w)| w * x(p0 + t * dir).dot(&dir)).sum()
        })
        .collect();
    Cochain::from_values(mesh, 1, values)
}

/// Flat of an [`AnalyticField::Vector`].
pub fn flat_field(x: &AnalyticField, mesh: &PolygonMesh, quad: &QuadratureSpec) -> Result<Cochain, CochainError> {
    match x {
        AnalyticField::Vector(f) | AnalyticField::Covector(f) => flat(f, mesh, quad),
        _ => Err(CochainError::FieldKindMismatch {
            kind: x.kind_name(),
            degree: 1,
        }),
    }
}

/// Discrete sharp: per-vertex reconstruction of a vector from a 1-cochain.
///
/// For each face f around v, with e₁ the halfedge ending at v and e₂ the one
/// starting at v (values taken with the face's orientation):
///
/// (β♯)|_f = β(e₂)/|e₂| · (n_f × e₁)/|e₁| − β(e₁)/|e₁| · (n_f × e₂)/|e₂|
///
/// and β♯(v) averages those over the ρ(v) adjacent faces.
pub fn sharp(beta: &Cochain, mesh: &PolygonMesh) -> Result<VertexVectorField, CochainError> {
    if beta.mesh_id() != mesh.id() {
        return Err(CochainError::MeshMismatch);
    }
    if beta.degree() != 1 {
        return Err(CochainError::DegreeMismatch {
            expected: 1,
            got: beta.degree(),
        });
    }
    let mut vectors = Vec::with_capacity(mesh.num_vertices());
    for v in 0..mesh.num_vertices() {
        let faces = mesh.vertex_faces(v);
        if faces.is_empty() {
            return Err(CochainError::IsolatedVertex(v));
        }
        let mut acc = Vec3::zeros();
        for &f in faces {
            let n = mesh.face_geometry(f)?.unit_normal;
            let verts = mesh.face_vertices(f);
            let p = verts.len();
            let k = verts.iter().position(|&u| u == v).expect("vertex in face");
            let span = mesh.face_halfedge_range(f);
            let h_out = span.start + k; // starts at v
            let h_in = span.start + (k + p - 1) % p; // ends at v
            let he_out = mesh.halfedge(h_out);
            let he_in = mesh.halfedge(h_in);
            let vec_out = mesh.halfedge_vector(h_out);
            let vec_in = mesh.halfedge_vector(h_in);
            let b_out = he_out.sign as f64 * beta[he_out.edge];
            let b_in = he_in.sign as f64 * beta[he_in.edge];
            let (l_out, l_in) = (vec_out.norm(), vec_in.norm());
            acc += (b_out / l_out) * (n.cross(&vec_in) / l_in) - (b_in / l_in) * (n.cross(&vec_out) / l_out);
        }
        vectors.push(acc / faces.len() as f64);
    }
    Ok(VertexVectorField {
        mesh_id: mesh.id(),
        vectors,
    })
}

/// The edge-midpoint Gram matrix M_f = (1/|f|) B_f B_fᵀ of a face, with the
/// midpoints taken relative to the face centroid. Used by the reference
/// 1-form inner product and error norm.
pub(crate) fn midpoint_gram_face_matrix(mesh: &PolygonMesh, face: usize) -> Result<Vec<Vec<f64>>, MeshError> {
    let g = mesh.face_geometry(face)?;
    let verts = mesh.face_vertices(face);
    let p = verts.len();
    let mids: Vec<Vec3> = (0..p)
        .map(|k| {
            let a = mesh.position(verts[k]);
            let b = mesh.position(verts[(k + 1) % p]);
            0.5 * (a + b) - g.centroid
        })
        .collect();
    Ok((0..p)
        .map(|i| (0..p).map(|j| mids[i].dot(&mids[j]) / g.area).collect())
        .collect())
}

/// L² and L∞ errors between a computed cochain ξ and a reference Ξ.
///
/// L∞ is the max absolute cell difference. L² is √(δᵀ M_k δ) with the
/// reference inner products: M₀ and M₂ diagonal (vertex area weights and
/// inverse face areas), M₁ assembled per face from the edge-midpoint Gram
/// matrices on face-oriented values.
pub fn error_norms(mesh: &PolygonMesh, xi: &Cochain, reference: &Cochain) -> Result<(f64, f64), CochainError> {
    error_norms_impl(mesh, xi, reference, None)
}

/// [`error_norms`] restricted to the cells selected by `mask` (the
/// difference is zeroed elsewhere). Used by boundary-sensitive studies that
/// measure interior cells only.
pub fn error_norms_masked(
    mesh: &PolygonMesh,
    xi: &Cochain,
    reference: &Cochain,
    mask: &[bool],
) -> Result<(f64, f64), CochainError> {
    if mask.len() != xi.len() {
        return Err(CochainError::LengthMismatch {
            expected: xi.len(),
            got: mask.len(),
        });
    }
    error_norms_impl(mesh, xi, reference, Some(mask))
}

fn error_norms_impl(
    mesh: &PolygonMesh,
    xi: &Cochain,
    reference: &Cochain,
    mask: Option<&[bool]>,
) -> Result<(f64, f64), CochainError> {
    xi.check_compatible(reference)?;
    if xi.mesh_id() != mesh.id() {
        return Err(CochainError::MeshMismatch);
    }
    let diff: Vec<f64> = xi
        .values()
        .iter()
        .zip(reference.values())
        .enumerate()
        .map(|(i, (a, b))| match mask {
            Some(m) if !m[i] => 0.0,
            _ => a - b,
        })
        .collect();
    let linf = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let quad_form = match xi.degree() {
        0 => {
            let mut s = 0.0;
            for (v, d) in diff.iter().enumerate() {
                let w: f64 = mesh
                    .vertex_faces(v)
                    .iter()
                    .map(|&f| {
                        let g = mesh.face_geometry_raw(f);
                        g.area / mesh.face_degree(f) as f64
                    })
                    .sum();
                s += w * d * d;
            }
            s
        }
        1 => {
            let mut s = 0.0;
            for f in 0..mesh.num_faces() {
                let m = midpoint_gram_face_matrix(mesh, f)?;
                let span = mesh.face_halfedge_range(f);
                let local: Vec<f64> = span
                    .map(|h| {
                        let he = mesh.halfedge(h);
                        he.sign as f64 * diff[he.edge]
                    })
                    .collect();
                for i in 0..local.len() {
                    for j in 0..local.len() {
                        s += local[i] * m[i][j] * local[j];
                    }
                }
            }
            s
        }
        2 => {
            let mut s = 0.0;
            for (f, d) in diff.iter().enumerate() {
                s += d * d / mesh.face_geometry(f)?.area;
            }
            s
        }
        d => {
            return Err(CochainError::DegreeMismatch { expected: 2, got: d });
        }
    };
    // quadratic form is positive semidefinite; clamp tiny negative rounding
    Ok((quad_form.max(0.0).sqrt(), linf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;

    fn unit_square() -> PolygonMesh {
        build_mesh(
            vec![
                Vec3::new(0., 0., 0.),
                Vec3::new(1., 0., 0.),
                Vec3::new(1., 1., 0.),
                Vec3::new(0., 1., 0.),
            ],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn constant_scalar_discretizes_to_constant() {
        let m = unit_square();
        let f = AnalyticField::scalar(|_| 2.5);
        let c = discretize(&f, &m, 0, &QuadratureSpec::default()).unwrap();
        assert!(c.values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn dx_integrates_exactly_over_a_diagonal_edge() {
        let m = build_mesh(
            vec![Vec3::new(0., 0., 0.), Vec3::new(1., 1., 0.), Vec3::new(0., 1., 0.)],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let dx = AnalyticField::covector(|_| Vec3::new(1.0, 0.0, 0.0));
        let c = discretize(&dx, &m, 1, &QuadratureSpec::default()).unwrap();
        let e01 = (0..m.num_edges()).find(|&e| m.edge(e) == (0, 1)).unwrap();
        assert!((c[e01] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_area_form_over_unit_square_is_one() {
        let m = unit_square();
        let w = AnalyticField::two_form(|_| Vec3::new(0.0, 0.0, 1.0)); // dx∧dy
        let c = discretize(&w, &m, 2, &QuadratureSpec::default()).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let m = unit_square();
        let f = AnalyticField::scalar(|_| 1.0);
        assert!(matches!(
            discretize(&f, &m, 1, &QuadratureSpec::default()),
            Err(CochainError::FieldKindMismatch { .. })
        ));
    }

    #[test]
    fn invalid_quadrature_order_is_reported() {
        let m = unit_square();
        let f = AnalyticField::covector(|_| Vec3::new(1.0, 0.0, 0.0));
        let quad = QuadratureSpec {
            edge_order: 0,
            triangle_degree: 4,
        };
        assert!(matches!(
            discretize(&f, &m, 1, &quad),
            Err(CochainError::Quadrature(_))
        ));
    }

    #[test]
    fn flat_of_constant_field_is_edge_dot_product() {
        let m = unit_square();
        let x: VectorFn = std::sync::Arc::new(|_| Vec3::new(0.7, -0.3, 0.2));
        let c = flat(&x, &m, &QuadratureSpec::default()).unwrap();
        for e in 0..m.num_edges() {
            let expect = Vec3::new(0.7, -0.3, 0.2).dot(&m.edge_vector(e));
            assert!((c[e] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_of_rotation_field_over_antidiagonal() {
        // X = (−y, x, 0), edge (1,0,0) → (0,1,0): ∫₀¹ (t + (1−t)) dt = 1
        let m = build_mesh(
            vec![Vec3::new(1., 0., 0.), Vec3::new(0., 1., 0.), Vec3::new(0., 0., 0.)],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let x: VectorFn = std::sync::Arc::new(|p: Vec3| Vec3::new(-p.y, p.x, 0.0));
        let c = flat(&x, &m, &QuadratureSpec::default()).unwrap();
        let e01 = (0..m.num_edges()).find(|&e| m.edge(e) == (0, 1)).unwrap();
        assert!((c[e01] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn flat_of_zero_field_is_zero() {
        let m = unit_square();
        let x: VectorFn = std::sync::Arc::new(|_| Vec3::zeros());
        let c = flat(&x, &m, &QuadratureSpec::default()).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sharp_of_zero_is_zero() {
        let m = unit_square();
        let beta = Cochain::zeros(&m, 1);
        let s = sharp(&beta, &m).unwrap();
        assert!(s.vectors.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn sharp_reconstructs_constant_field_exactly_on_square() {
        let m = unit_square();
        let x_vec = Vec3::new(0.8, -1.3, 0.0);
        let x: VectorFn = std::sync::Arc::new(move |_| x_vec);
        let beta = flat(&x, &m, &QuadratureSpec::default()).unwrap();
        let s = sharp(&beta, &m).unwrap();
        for v in &s.vectors {
            assert!((v - x_vec).norm() < 1e-13, "got {v:?}");
        }
    }

    #[test]
    fn sharp_is_parallel_to_constant_field_on_planar_polygons() {
        // irregular planar pentagon, constant in-plane field
        let m = build_mesh(
            vec![
                Vec3::new(0., 0., 0.),
                Vec3::new(2.1, 0.2, 0.),
                Vec3::new(2.9, 1.7, 0.),
                Vec3::new(1.2, 2.8, 0.),
                Vec3::new(-0.7, 1.4, 0.),
            ],
            vec![vec![0, 1, 2, 3, 4]],
        )
        .unwrap();
        let x_vec = Vec3::new(1.3, 0.4, 0.0);
        let x: VectorFn = std::sync::Arc::new(move |_| x_vec);
        let beta = flat(&x, &m, &QuadratureSpec::default()).unwrap();
        let s = sharp(&beta, &m).unwrap();
        for v in &s.vectors {
            let cross = v.cross(&x_vec).norm();
            assert!(cross < 1e-12 * v.norm().max(1.0), "not parallel: {v:?}");
            assert!(v.dot(&x_vec) > 0.0, "reversed: {v:?}");
        }
    }

    #[test]
    fn error_norms_of_equal_cochains_are_zero() {
        let m = unit_square();
        let a = Cochain::from_values(&m, 1, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let (l2, linf) = error_norms(&m, &a, &a).unwrap();
        assert_eq!((l2, linf), (0.0, 0.0));
    }

    #[test]
    fn degree_two_l2_on_unit_square() {
        // single face of area 1: M₂ = 1, so l2 = |a|
        let m = unit_square();
        let a = Cochain::from_values(&m, 2, vec![0.75]).unwrap();
        let z = Cochain::zeros(&m, 2);
        let (l2, linf) = error_norms(&m, &a, &z).unwrap();
        assert!((l2 - 0.75).abs() < 1e-15);
        assert!((linf - 0.75).abs() < 1e-15);
    }

    #[test]
    fn degree_one_l2_on_unit_square_hand_value() {
        // Midpoints relative to the centroid are (0,−½),(½,0),(0,½),(−½,0),
        // so M_f = ¼·[[1,0,−1,0],[0,1,0,−1],[−1,0,1,0],[0,−1,0,1]] and a
        // difference supported on the first edge gives √(1·¼) = ½.
        let m = unit_square();
        let a = Cochain::from_values(&m, 1, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let z = Cochain::zeros(&m, 1);
        let (l2, linf) = error_norms(&m, &a, &z).unwrap();
        assert!((l2 - 0.5).abs() < 1e-15, "l2 = {l2}");
        assert!((linf - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degree_zero_l2_uses_vertex_area_weights() {
        // unit square: each vertex weight = |f|/p = 1/4
        let m = unit_square();
        let a = Cochain::from_values(&m, 0, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let z = Cochain::zeros(&m, 0);
        let (l2, _) = error_norms(&m, &a, &z).unwrap();
        assert!((l2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let m = unit_square();
        let a = Cochain::zeros(&m, 0);
        let b = Cochain::zeros(&m, 1);
        assert!(matches!(
            error_norms(&m, &a, &b),
            Err(CochainError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn flat_commutes_with_scaling() {
        let m = unit_square();
        let x: VectorFn = std::sync::Arc::new(|p: Vec3| Vec3::new(p.y * p.y, -p.x, 0.3));
        let cx: VectorFn = std::sync::Arc::new(|p: Vec3| 2.5 * Vec3::new(p.y * p.y, -p.x, 0.3));
        let a = flat(&x, &m, &QuadratureSpec::default()).unwrap().scale(2.5);
        let b = flat(&cx, &m, &QuadratureSpec::default()).unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            assert!((u - v).abs() < 1e-13);
        }
    }
}
