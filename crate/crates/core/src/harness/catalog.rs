//! Named analytic fields for the built-in experiments.
//!
//! Every entry carries its home surface (`None` = usable on any of the test
//! surfaces). Names are stable CLI-facing identifiers.

use std::sync::Arc;

use crate::fields::{AnalyticField, VectorFn};
use crate::surface::AnalyticSurface;
use crate::Vec3;

use super::HarnessError;

/// Trigonometric/quadratic form sets and vector fields, keyed by name.
pub struct FormCatalog;

fn sq2() -> f64 {
    std::f64::consts::SQRT_2
}

/// Gradient of the Gaussian bump exp(−|p−c|²).
fn bump_gradient(p: Vec3, c: Vec3) -> Vec3 {
    let d = p - c;
    -2.0 * d * (-d.norm_squared()).exp()
}

fn torus_normal(p: Vec3) -> Vec3 {
    let s = AnalyticSurface::standard_torus();
    s.normal(s.project(p))
}

/// Positive vortex center of the two-vortex torus field (and the potential
/// maximum location).
pub fn vortex_center_ccw() -> Vec3 {
    Vec3::new(1.5, 0.0, 0.0)
}

/// Negative vortex center (potential minimum).
pub fn vortex_center_cw() -> Vec3 {
    Vec3::new(-sq2() / 2.0, sq2() / 2.0, 0.5)
}

/// Bump center of the advected vorticial field.
pub fn advection_bump_center() -> Vec3 {
    Vec3::new(-sq2() / 2.0, sq2() / 2.0, 0.5)
}

impl FormCatalog {
    /// Discretizable form (0-, 1-, or 2-form) by name, with its home
    /// surface.
    pub fn form(name: &str) -> Result<(Option<AnalyticSurface>, AnalyticField), HarnessError> {
        let torus = AnalyticSurface::standard_torus();
        let entry = match name {
            // planar trigonometric wedge set
            "plane-trig-a0" => (
                Some(AnalyticSurface::Plane),
                AnalyticField::scalar(|p| p.x.sin() * p.y.cos() + 1.0),
            ),
            "plane-trig-b1" => (
                Some(AnalyticSurface::Plane),
                AnalyticField::covector(|p| {
                    Vec3::new(p.x.sin().powi(2) - 1.0, 3.0 * (p.x + 2.0).cos() + p.y.sin(), 0.0)
                }),
            ),
            "plane-trig-g1" => (
                Some(AnalyticSurface::Plane),
                AnalyticField::covector(|p| Vec3::new(p.x.cos() * p.y.sin() + 3.0, p.y.cos(), 0.0)),
            ),
            "plane-trig-w2" => (
                Some(AnalyticSurface::Plane),
                AnalyticField::two_form(|p| Vec3::new(0.0, 0.0, (p.x * p.y).sin() + 1f64.cos())),
            ),
            // planar codifferential set
            "plane-codiff-b1" => (
                Some(AnalyticSurface::Plane),
                AnalyticField::covector(|p| {
                    Vec3::new(
                        (2.0 * p.x).sin() + (p.y / 2.0).cos(),
                        3.0 * p.x.sin() - p.y.cos(),
                        0.0,
                    )
                }),
            ),
            "plane-codiff-k2" => (
                Some(AnalyticSurface::Plane),
                AnalyticField::two_form(|p| {
                    Vec3::new(0.0, 0.0, ((p.x + 1.0) / 4.0).sin() + (1.0 - p.y / 3.0).cos())
                }),
            ),
            // planar Laplacian form
            "plane-lap-a0" => (
                Some(AnalyticSurface::Plane),
                AnalyticField::scalar(|p| (p.x - 1.0).sin() - (2.0 * p.y).cos()),
            ),
            // torus set (rotation field and friends)
            "torus-rot-a0" => (Some(torus), AnalyticField::scalar(|p| p.x * p.x + p.y * p.y)),
            "torus-rot-b1" => (Some(torus), AnalyticField::covector(|p| Vec3::new(-p.y, p.x, 0.0))),
            "torus-rot-w2" => (Some(torus), AnalyticField::two_form(torus_normal)),
            // sphere set
            "sphere-rot-a0" => (
                Some(AnalyticSurface::Sphere),
                AnalyticField::scalar(|p| p.x * p.x + p.y * p.y),
            ),
            "sphere-rot-b1" => (
                Some(AnalyticSurface::Sphere),
                AnalyticField::covector(|p| Vec3::new(-p.x * p.z, -p.y * p.z, p.x * p.x + p.y * p.y)),
            ),
            "sphere-rot-w2" => (Some(AnalyticSurface::Sphere), AnalyticField::two_form(|p| p)),
            _ => return Err(HarnessError::UnknownForm(name.to_string())),
        };
        Ok(entry)
    }

    /// Tangent vector field by name.
    pub fn vector_field(name: &str) -> Result<(Option<AnalyticSurface>, VectorFn), HarnessError> {
        let torus = AnalyticSurface::standard_torus();
        let entry: (Option<AnalyticSurface>, VectorFn) = match name {
            // rotation about z; tangent to every surface of revolution
            "rotation-z" => (None, Arc::new(|p: Vec3| Vec3::new(-p.y, p.x, 0.0))),
            // tangent field orthogonal to rotation-z on the standard torus
            "torus-ortho-rot" => (
                Some(torus),
                Arc::new(|p: Vec3| {
                    let rho = (p.x * p.x + p.y * p.y).sqrt();
                    2.0 * Vec3::new(-p.x * p.z, -p.y * p.z, p.x * p.x + p.y * p.y - rho)
                }),
            ),
            // counter-rotating vortex pair: ∇(G₁ − G₂) × n
            "torus-vortex-pair" => (
                Some(torus),
                Arc::new(|p: Vec3| {
                    let g = bump_gradient(p, vortex_center_ccw()) - bump_gradient(p, vortex_center_cw());
                    g.cross(&torus_normal(p))
                }),
            ),
            // harmonic rotation plus the vortex pair (decomposition input)
            "torus-two-vortex" => (
                Some(torus),
                Arc::new(|p: Vec3| {
                    let g = bump_gradient(p, vortex_center_ccw()) - bump_gradient(p, vortex_center_cw());
                    Vec3::new(-p.y, p.x, 0.0) + g.cross(&torus_normal(p))
                }),
            ),
            // single-bump vorticial field advected around the torus
            "torus-vortex" => (
                Some(torus),
                Arc::new(|p: Vec3| {
                    (-bump_gradient(p, advection_bump_center())).cross(&torus_normal(p))
                }),
            ),
            _ => return Err(HarnessError::UnknownVectorField(name.to_string())),
        };
        Ok(entry)
    }

    /// Closed-form codifferential of a catalog form, where one is defined.
    /// The sign follows the assembled δ = −⋆d⋆ convention.
    pub fn analytic_codifferential(name: &str) -> Option<AnalyticField> {
        match name {
            // δ(P dx + Q dy) = −(P_x + Q_y)
            "plane-codiff-b1" => Some(AnalyticField::scalar(|p| {
                -(2.0 * (2.0 * p.x).cos() + p.y.sin())
            })),
            // δ(g dx∧dy) = g_y dx − g_x dy
            "plane-codiff-k2" => Some(AnalyticField::covector(|p| {
                Vec3::new(
                    (1.0 - p.y / 3.0).sin() / 3.0,
                    -((p.x + 1.0) / 4.0).cos() / 4.0,
                    0.0,
                )
            })),
            _ => None,
        }
    }

    /// Closed-form Laplacian of a catalog 0-form in the assembled δd sign
    /// convention (the negative of div grad).
    pub fn analytic_laplacian(name: &str) -> Option<AnalyticField> {
        match name {
            "plane-lap-a0" => Some(AnalyticField::scalar(|p| (p.x - 1.0).sin() - 4.0 * (2.0 * p.y).cos())),
            _ => None,
        }
    }

    /// Forms whose Lie derivative along the named field vanishes (rotation
    /// about z applied to azimuthally symmetric data).
    pub fn lie_derivative_vanishes(form: &str, field: &str) -> bool {
        field == "rotation-z"
            && matches!(
                form,
                "sphere-rot-a0" | "sphere-rot-b1" | "sphere-rot-w2" | "torus-rot-a0" | "torus-rot-b1"
                    | "torus-rot-w2"
            )
    }

    pub fn form_names() -> &'static [&'static str] {
        &[
            "plane-trig-a0",
            "plane-trig-b1",
            "plane-trig-g1",
            "plane-trig-w2",
            "plane-codiff-b1",
            "plane-codiff-k2",
            "plane-lap-a0",
            "torus-rot-a0",
            "torus-rot-b1",
            "torus-rot-w2",
            "sphere-rot-a0",
            "sphere-rot-b1",
            "sphere-rot-w2",
        ]
    }

    pub fn vector_field_names() -> &'static [&'static str] {
        &[
            "rotation-z",
            "torus-ortho-rot",
            "torus-vortex-pair",
            "torus-two-vortex",
            "torus-vortex",
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_names_resolve() {
        for name in FormCatalog::form_names() {
            assert!(FormCatalog::form(name).is_ok(), "{name}");
        }
        for name in FormCatalog::vector_field_names() {
            assert!(FormCatalog::vector_field(name).is_ok(), "{name}");
        }
        assert!(FormCatalog::form("nope").is_err());
        assert!(FormCatalog::vector_field("nope").is_err());
    }

    #[test]
    fn catalog_vector_fields_are_tangent_to_their_surfaces() {
        let torus = AnalyticSurface::standard_torus();
        for name in ["torus-ortho-rot", "torus-vortex-pair", "torus-two-vortex", "torus-vortex"] {
            let (_, f) = FormCatalog::vector_field(name).unwrap();
            for seed in 0..50 {
                let t = seed as f64 * 0.37;
                let p = torus.project(Vec3::new(t.cos() * 1.3, t.sin() * 0.9, (t * 1.7).sin()));
                let n = torus.normal(p);
                let v = f(p);
                assert!(
                    v.dot(&n).abs() < 1e-10 * v.norm().max(1.0),
                    "{name} not tangent at {p:?}"
                );
            }
        }
    }

    #[test]
    fn ortho_rot_is_the_rotated_rotation_field() {
        // on the standard torus: Y = n × X with X = (−y, x, 0)
        let torus = AnalyticSurface::standard_torus();
        let (_, y) = FormCatalog::vector_field("torus-ortho-rot").unwrap();
        for seed in 0..20 {
            let t = seed as f64 * 0.61;
            let p = torus.project(Vec3::new(1.2 * t.cos(), 1.1 * t.sin(), 0.3 * (2.0 * t).cos()));
            let x = Vec3::new(-p.y, p.x, 0.0);
            let expect = torus.normal(p).cross(&x);
            assert!((y(p) - expect).norm() < 1e-10, "at {p:?}: {:?} vs {expect:?}", y(p));
        }
    }

    #[test]
    fn vortex_centers_lie_on_the_torus() {
        let torus = AnalyticSurface::standard_torus();
        for c in [vortex_center_ccw(), vortex_center_cw(), advection_bump_center()] {
            assert!((torus.project(c) - c).norm() < 1e-12, "{c:?}");
        }
    }
}
