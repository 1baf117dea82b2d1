//! Analytic test surfaces: the planar square [−1,1]², the unit sphere, and a
//! torus azimuthally symmetric about the z-axis.

use crate::quadrature::gauss_legendre_01;
use crate::Vec3;

/// Smooth reference surface that generated meshes live on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticSurface {
    /// z = 0 over [−1, 1]².
    Plane,
    /// Unit sphere centered at the origin.
    Sphere,
    /// Torus with the given major radius (circle in z = 0) and minor radius.
    Torus { major: f64, minor: f64 },
}

impl AnalyticSurface {
    /// The torus used throughout the experiment catalog (R = 1, r = ½).
    pub fn standard_torus() -> Self {
        AnalyticSurface::Torus { major: 1.0, minor: 0.5 }
    }

    /// Nearest point on the surface. For the plane this clamps to the
    /// [−1, 1]² square so jittered vertices stay in the domain.
    pub fn project(&self, p: Vec3) -> Vec3 {
        match *self {
            AnalyticSurface::Plane => Vec3::new(p.x.clamp(-1.0, 1.0), p.y.clamp(-1.0, 1.0), 0.0),
            AnalyticSurface::Sphere => {
                let n = p.norm();
                if n == 0.0 {
                    Vec3::new(1.0, 0.0, 0.0)
                } else {
                    p / n
                }
            }
            AnalyticSurface::Torus { major, minor } => {
                let rho = (p.x * p.x + p.y * p.y).sqrt();
                let ring = if rho == 0.0 {
                    Vec3::new(major, 0.0, 0.0)
                } else {
                    Vec3::new(major * p.x / rho, major * p.y / rho, 0.0)
                };
                let d = p - ring;
                let dn = d.norm();
                if dn == 0.0 {
                    ring + Vec3::new(0.0, 0.0, minor)
                } else {
                    ring + d * (minor / dn)
                }
            }
        }
    }

    /// Outward unit normal at a surface point.
    pub fn normal(&self, p: Vec3) -> Vec3 {
        match *self {
            AnalyticSurface::Plane => Vec3::new(0.0, 0.0, 1.0),
            AnalyticSurface::Sphere => {
                let n = p.norm();
                if n == 0.0 {
                    Vec3::new(0.0, 0.0, 1.0)
                } else {
                    p / n
                }
            }
            AnalyticSurface::Torus { major, .. } => {
                let rho = (p.x * p.x + p.y * p.y).sqrt();
                if rho == 0.0 {
                    return Vec3::new(0.0, 0.0, 1.0);
                }
                let d = Vec3::new(p.x - major * p.x / rho, p.y - major * p.y / rho, p.z);
                let dn = d.norm();
                if dn == 0.0 {
                    Vec3::new(p.x / rho, p.y / rho, 0.0)
                } else {
                    d / dn
                }
            }
        }
    }

    /// Deterministic orthonormal tangent pair (t₁, t₂) with t₁ × t₂ = normal.
    pub fn tangent_basis(&self, p: Vec3) -> (Vec3, Vec3) {
        let n = self.normal(p);
        let seed = if n.z.abs() < 0.9 {
            Vec3::new(0.0, 0.0, 1.0)
        } else {
            Vec3::new(1.0, 0.0, 0.0)
        };
        let t1 = seed.cross(&n).normalize();
        let t2 = n.cross(&t1);
        (t1, t2)
    }

    /// ∫ f dA by dense parameter-space quadrature: Gauss–Legendre panels on
    /// bounded directions, uniform (spectrally accurate) sampling on periodic
    /// ones. Used as the reference value for the discrete Hodge norms.
    pub fn integrate(&self, f: &dyn Fn(Vec3) -> f64, resolution: usize) -> f64 {
        let n = resolution.max(8);
        match *self {
            AnalyticSurface::Plane => {
                // [-1,1]^2 split into panels with a fixed 8-point rule each
                let rule = gauss_legendre_01(8).unwrap();
                let panels = n / 8 + 1;
                let width = 2.0 / panels as f64;
                let mut sum = 0.0;
                for i in 0..panels {
                    for j in 0..panels {
                        let x0 = -1.0 + i as f64 * width;
                        let y0 = -1.0 + j as f64 * width;
                        for &(u, wu) in &rule {
                            for &(v, wv) in &rule {
                                let p = Vec3::new(x0 + u * width, y0 + v * width, 0.0);
                                sum += wu * wv * width * width * f(p);
                            }
                        }
                    }
                }
                sum
            }
            AnalyticSurface::Sphere => {
                // colatitude by panelized Gauss-Legendre, azimuth uniform
                let rule = gauss_legendre_01(8).unwrap();
                let panels = n / 8 + 1;
                let dphi = std::f64::consts::PI / panels as f64;
                let ntheta = 2 * n;
                let dtheta = 2.0 * std::f64::consts::PI / ntheta as f64;
                let mut sum = 0.0;
                for i in 0..panels {
                    let phi0 = i as f64 * dphi;
                    for &(u, wu) in &rule {
                        let phi = phi0 + u * dphi;
                        for k in 0..ntheta {
                            let theta = k as f64 * dtheta;
                            let p = Vec3::new(
                                phi.sin() * theta.cos(),
                                phi.sin() * theta.sin(),
                                phi.cos(),
                            );
                            sum += wu * dphi * dtheta * phi.sin() * f(p);
                        }
                    }
                }
                sum
            }
            AnalyticSurface::Torus { major, minor } => {
                // both directions periodic: uniform sampling is spectral
                let nt = 2 * n;
                let dt = 2.0 * std::f64::consts::PI / nt as f64;
                let mut sum = 0.0;
                for i in 0..nt {
                    let theta = i as f64 * dt;
                    for j in 0..nt {
                        let psi = j as f64 * dt;
                        let rho = major + minor * psi.cos();
                        let p = Vec3::new(rho * theta.cos(), rho * theta.sin(), minor * psi.sin());
                        sum += dt * dt * minor * rho * f(p);
                    }
                }
                sum
            }
        }
    }
}
