//! Exact-identity suite over built-in meshes: the fast sanity layer behind
//! `polydec selftest`. Prints one PASS/FAIL line per check and returns the
//! failure count.

use polydec::cochain::Cochain;
use polydec::meshgen::{gen_regular, jitter, unstructure};
use polydec::operators::{
    codifferential, exterior_derivative, hodge_star, lie_derivative, wedge, Scheme,
};
use polydec::surface::AnalyticSurface;
use polydec::PolygonMesh;
use rand::{Rng, SeedableRng};

fn random_cochain(mesh: &PolygonMesh, degree: usize, rng: &mut impl Rng) -> Cochain {
    Cochain::from_values(
        mesh,
        degree,
        (0..mesh.num_cells(degree)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
    .unwrap()
}

fn test_meshes() -> Vec<(&'static str, PolygonMesh)> {
    let plane = gen_regular(AnalyticSurface::Plane, 6).unwrap();
    let (plane_u, _) = unstructure(&plane, 0.25, 3).unwrap();
    let torus = gen_regular(AnalyticSurface::standard_torus(), 8).unwrap();
    let torus_j = jitter(&torus, AnalyticSurface::standard_torus(), 0.3, 5).unwrap();
    let sphere = gen_regular(AnalyticSurface::Sphere, 5).unwrap();
    vec![
        ("plane 6x6", plane),
        ("plane unstructured", plane_u),
        ("torus 8x8", torus),
        ("torus jittered", torus_j),
        ("sphere cube 5", sphere),
    ]
}

struct Runner {
    failures: usize,
}

impl Runner {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("PASS  {name}");
        } else {
            println!("FAIL  {name}: {detail}");
            self.failures += 1;
        }
    }
}

pub fn run_all() -> usize {
    let mut r = Runner { failures: 0 };
    let meshes = test_meshes();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);

    for (name, mesh) in &meshes {
        let d0 = exterior_derivative(mesh, 0).unwrap();
        let d1 = exterior_derivative(mesh, 1).unwrap();
        let dd = d1.matrix().multiply(d0.matrix()).unwrap();
        r.check(&format!("d1*d0 == 0 on {name}"), dd.max_abs() == 0.0, format!("max {:.3e}", dd.max_abs()));
    }

    for (name, mesh) in &meshes {
        let beta = random_cochain(mesh, 1, &mut rng);
        let gamma = random_cochain(mesh, 1, &mut rng);
        let bg = wedge(mesh, &beta, &gamma).unwrap();
        let gb = wedge(mesh, &gamma, &beta).unwrap();
        let worst = bg
            .values()
            .iter()
            .zip(gb.values())
            .map(|(a, b)| (a + b).abs())
            .fold(0.0f64, f64::max);
        r.check(
            &format!("wedge skew-commutativity on {name}"),
            worst < 1e-12,
            format!("worst {worst:.3e}"),
        );
    }

    // Leibniz d(α∧β) = dα∧β + (−1)^k α∧dβ for (k,l) in {(0,0),(0,1),(1,0)}
    for (name, mesh) in &meshes {
        let d0 = exterior_derivative(mesh, 0).unwrap();
        let d1 = exterior_derivative(mesh, 1).unwrap();
        let a0 = random_cochain(mesh, 0, &mut rng);
        let b0 = random_cochain(mesh, 0, &mut rng);
        let b1 = random_cochain(mesh, 1, &mut rng);
        let mut worst = 0.0f64;
        {
            // (0,0)
            let lhs = d0.apply(&wedge(mesh, &a0, &b0).unwrap()).unwrap();
            let rhs = wedge(mesh, &d0.apply(&a0).unwrap(), &b0)
                .unwrap()
                .add_scaled(&wedge(mesh, &a0, &d0.apply(&b0).unwrap()).unwrap(), 1.0)
                .unwrap();
            let scale = lhs.max_abs().max(1.0);
            worst = worst.max(
                lhs.values()
                    .iter()
                    .zip(rhs.values())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max)
                    / scale,
            );
        }
        {
            // (0,1)
            let lhs = d1.apply(&wedge(mesh, &a0, &b1).unwrap()).unwrap();
            let rhs = wedge(mesh, &d0.apply(&a0).unwrap(), &b1)
                .unwrap()
                .add_scaled(&wedge(mesh, &a0, &d1.apply(&b1).unwrap()).unwrap(), 1.0)
                .unwrap();
            let scale = lhs.max_abs().max(1.0);
            worst = worst.max(
                lhs.values()
                    .iter()
                    .zip(rhs.values())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max)
                    / scale,
            );
        }
        {
            // (1,0): d(β∧α) = dβ∧α − β∧dα
            let lhs = d1.apply(&wedge(mesh, &b1, &a0).unwrap()).unwrap();
            let rhs = wedge(mesh, &d1.apply(&b1).unwrap(), &a0)
                .unwrap()
                .add_scaled(&wedge(mesh, &b1, &d0.apply(&a0).unwrap()).unwrap(), -1.0)
                .unwrap();
            let scale = lhs.max_abs().max(1.0);
            worst = worst.max(
                lhs.values()
                    .iter()
                    .zip(rhs.values())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max)
                    / scale,
            );
        }
        r.check(
            &format!("Leibniz rule on {name}"),
            worst < 1e-12,
            format!("worst relative {worst:.3e}"),
        );
    }

    // planar Hodge exactness
    for (name, mesh) in meshes.iter().filter(|(n, _)| n.starts_with("plane")) {
        let star0 = hodge_star(mesh, 0).unwrap();
        let star2 = hodge_star(mesh, 2).unwrap();
        let ones = Cochain::from_values(mesh, 0, vec![1.0; mesh.num_vertices()]).unwrap();
        let areas: Vec<f64> = (0..mesh.num_faces()).map(|f| mesh.face_geometry_raw(f).area).collect();
        let mu = Cochain::from_values(mesh, 2, areas.clone()).unwrap();
        let s0 = star0.apply(&ones).unwrap();
        let s2 = star2.apply(&mu).unwrap();
        let w0 = s0
            .values()
            .iter()
            .zip(&areas)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let w2 = s2.values().iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
        r.check(
            &format!("planar star exactness on {name}"),
            w0 < 1e-12 && w2 < 1e-12,
            format!("star0 {w0:.3e} star2 {w2:.3e}"),
        );
    }

    // Lie derivative of a constant function vanishes exactly
    for (name, mesh) in &meshes {
        let x = random_cochain(mesh, 1, &mut rng);
        let c = Cochain::from_values(mesh, 0, vec![4.5; mesh.num_vertices()]).unwrap();
        let out = lie_derivative(mesh, &x, &c).unwrap();
        r.check(
            &format!("L_X const == 0 on {name}"),
            out.values().iter().all(|&v| v == 0.0),
            format!("max {:.3e}", out.max_abs()),
        );
    }

    // HHD reconstruction on a small torus
    {
        let mesh = gen_regular(AnalyticSurface::standard_torus(), 10).unwrap();
        let omega = random_cochain(&mesh, 1, &mut rng);
        let options = polydec::sparse::SolveOptions::new(polydec::sparse::SolveMethod::LeastSquares)
            .with_tol(1e-10);
        let result = polydec::apps::helmholtz_hodge(&mesh, &omega, &options).unwrap();
        let rebuilt = result.rotational.add_scaled(&result.harmonic, 1.0).unwrap();
        let scale = omega.max_abs().max(1.0);
        let worst = rebuilt
            .values()
            .iter()
            .zip(omega.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / scale;
        r.check(
            "HHD reconstruction omega == delta beta + gamma",
            worst < 1e-12,
            format!("worst relative {worst:.3e}"),
        );
    }

    // codifferential adjoint-composition sanity: δ₁(d₀ const) == 0
    for (name, mesh) in &meshes {
        let d0 = exterior_derivative(mesh, 0).unwrap();
        let delta1 = codifferential(mesh, 1, Scheme::Ours).unwrap();
        let c = Cochain::from_values(mesh, 0, vec![-2.5; mesh.num_vertices()]).unwrap();
        let out = delta1.apply(&d0.apply(&c).unwrap()).unwrap();
        r.check(
            &format!("delta1(d0 const) == 0 on {name}"),
            out.values().iter().all(|&v| v == 0.0),
            format!("max {:.3e}", out.max_abs()),
        );
    }

    println!(
        "selftest: {} failure(s)",
        r.failures
    );
    r.failures
}
