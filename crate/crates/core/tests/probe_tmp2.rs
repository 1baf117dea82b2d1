use polydec::cochain::{discretize, flat, QuadratureSpec};
use polydec::harness::FormCatalog;
use polydec::meshgen::{gen_regular, jitter};
use polydec::operators::{codifferential, Scheme};
use polydec::surface::AnalyticSurface;
use polydec::fields::AnalyticField;

/// interior-depth of each vertex: 0 = on boundary, 1 = adjacent to boundary
/// vertex, etc.
fn vertex_depth(mesh: &polydec::PolygonMesh) -> Vec<usize> {
    let nv = mesh.num_vertices();
    let mut depth = vec![usize::MAX; nv];
    let mut frontier: Vec<usize> = Vec::new();
    for e in 0..mesh.num_edges() {
        if mesh.is_boundary_edge(e) {
            let (a, b) = mesh.edge(e);
            for v in [a, b] {
                if depth[v] != 0 {
                    depth[v] = 0;
                    frontier.push(v);
                }
            }
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in 0..mesh.num_edges() {
        let (a, b) = mesh.edge(e);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in &adj[v] {
                if depth[u] > d {
                    depth[u] = d;
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    depth
}

#[test]
fn probe_interior_masked_codifferential_plateau() {
    let quad = QuadratureSpec::default();
    let (_, beta_field) = FormCatalog::form("plane-codiff-b1").unwrap();
    let reference = FormCatalog::analytic_codifferential("plane-codiff-b1").unwrap();
    for depth_min in [1usize, 2, 3] {
        eprintln!("--- mask: vertex depth >= {depth_min} ---");
        for res in [32usize, 45, 64, 90, 128] {
            let mesh = jitter(&gen_regular(AnalyticSurface::Plane, res).unwrap(), AnalyticSurface::Plane, 0.4, 7).unwrap();
            let beta = discretize(&beta_field, &mesh, 1, &quad).unwrap();
            let expect = discretize(&reference, &mesh, 0, &quad).unwrap();
            let depth = vertex_depth(&mesh);
            let weights: Vec<f64> = (0..mesh.num_vertices())
                .map(|v| {
                    mesh.vertex_faces(v)
                        .iter()
                        .map(|&f| mesh.face_geometry_raw(f).area / mesh.face_degree(f) as f64)
                        .sum()
                })
                .collect();
            let mut line = format!("res {res}: ");
            for scheme in [Scheme::Ours, Scheme::Aw] {
                let delta = codifferential(&mesh, 1, scheme).unwrap();
                let got = delta.apply(&beta).unwrap();
                let mut l2 = 0.0;
                for v in 0..mesh.num_vertices() {
                    if depth[v] >= depth_min {
                        let d = got[v] - expect[v];
                        l2 += weights[v] * d * d;
                    }
                }
                line += &format!("{scheme} {:.4e}  ", l2.sqrt());
            }
            eprintln!("{line}");
        }
    }
    let _ = AnalyticField::scalar(|_| 0.0);
}
