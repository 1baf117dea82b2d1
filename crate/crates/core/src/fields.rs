//! Analytic fields: scalar functions, covector fields, 2-form densities, and
//! tangent vector fields, all given as closures over points of ℝ³.
//!
//! A covector field is represented by its proxy vector `B` with
//! `β(u) = ⟨B, u⟩`, and a 2-form by its proxy vector `w` with
//! `ω(u, v) = ⟨w, u × v⟩`; every smooth 2-form in ℝ³ has this shape, and the
//! area form of an oriented surface is simply `w = n̂`.

use std::sync::Arc;

use crate::surface::AnalyticSurface;
use crate::Vec3;

pub type ScalarFn = Arc<dyn Fn(Vec3) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Vec3) -> Vec3 + Send + Sync>;

/// A continuous field usable for discretization and as an oracle.
#[derive(Clone)]
pub enum AnalyticField {
    /// 0-form A(x).
    Scalar(ScalarFn),
    /// 1-form via proxy vector: β(u) = ⟨B(x), u⟩.
    Covector(VectorFn),
    /// 2-form via proxy vector: ω(u, v) = ⟨w(x), u × v⟩.
    TwoForm(VectorFn),
    /// Tangent vector field (input to flat / contraction experiments).
    Vector(VectorFn),
}

impl std::fmt::Debug for AnalyticField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AnalyticField::Scalar(_) => "AnalyticField::Scalar",
            AnalyticField::Covector(_) => "AnalyticField::Covector",
            AnalyticField::TwoForm(_) => "AnalyticField::TwoForm",
            AnalyticField::Vector(_) => "AnalyticField::Vector",
        })
    }
}

impl AnalyticField {
    pub fn scalar(f: impl Fn(Vec3) -> f64 + Send + Sync + 'static) -> Self {
        AnalyticField::Scalar(Arc::new(f))
    }

    pub fn covector(f: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        AnalyticField::Covector(Arc::new(f))
    }

    pub fn two_form(f: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        AnalyticField::TwoForm(Arc::new(f))
    }

    pub fn vector(f: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        AnalyticField::Vector(Arc::new(f))
    }

    pub fn zero_of_degree(degree: usize) -> Self {
        match degree {
            0 => AnalyticField::scalar(|_| 0.0),
            1 => AnalyticField::covector(|_| Vec3::zeros()),
            _ => AnalyticField::two_form(|_| Vec3::zeros()),
        }
    }

    /// Cochain degree this field discretizes to; `None` for vector fields
    /// (those go through the flat operator).
    pub fn form_degree(&self) -> Option<usize> {
        match self {
            AnalyticField::Scalar(_) => Some(0),
            AnalyticField::Covector(_) => Some(1),
            AnalyticField::TwoForm(_) => Some(2),
            AnalyticField::Vector(_) => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AnalyticField::Scalar(_) => "scalar",
            AnalyticField::Covector(_) => "covector",
            AnalyticField::TwoForm(_) => "two-form",
            AnalyticField::Vector(_) => "vector",
        }
    }
}

// ---------------------------------------------------------------------------
// Pointwise algebra on fields. These produce the closed-form results of the
// continuous operators (wedge, star, contraction) without any symbolic
// differentiation, for use as convergence-test references.
// ---------------------------------------------------------------------------

/// A · B as a covector field (0-form ∧ 1-form).
pub fn scalar_times_covector(a: &ScalarFn, b: &VectorFn) -> AnalyticField {
    let (a, b) = (a.clone(), b.clone());
    AnalyticField::covector(move |p| a(p) * b(p))
}

/// A · ω as a 2-form (0-form ∧ 2-form).
pub fn scalar_times_two_form(a: &ScalarFn, w: &VectorFn) -> AnalyticField {
    let (a, w) = (a.clone(), w.clone());
    AnalyticField::two_form(move |p| a(p) * w(p))
}

/// β ∧ γ as a 2-form with proxy B × Γ.
pub fn covector_wedge(b: &VectorFn, g: &VectorFn) -> AnalyticField {
    let (b, g) = (b.clone(), g.clone());
    AnalyticField::two_form(move |p| b(p).cross(&g(p)))
}

/// ⋆A: the 2-form A·μ on the oriented surface (proxy A·n̂).
pub fn star_scalar(surface: AnalyticSurface, a: &ScalarFn) -> AnalyticField {
    let a = a.clone();
    AnalyticField::two_form(move |p| a(p) * surface.normal(surface.project(p)))
}

/// ⋆β for a tangent covector field: 90° rotation n̂ × B.
pub fn star_covector(surface: AnalyticSurface, b: &VectorFn) -> AnalyticField {
    let b = b.clone();
    AnalyticField::covector(move |p| surface.normal(surface.project(p)).cross(&b(p)))
}

/// ⋆ω: the scalar density of a 2-form against the surface area form, ⟨w, n̂⟩.
pub fn star_two_form(surface: AnalyticSurface, w: &VectorFn) -> AnalyticField {
    let w = w.clone();
    AnalyticField::scalar(move |p| w(p).dot(&surface.normal(surface.project(p))))
}

/// i_X β = β(X) = ⟨B, X⟩ as a scalar field.
pub fn contract_covector(b: &VectorFn, x: &VectorFn) -> AnalyticField {
    let (b, x) = (b.clone(), x.clone());
    AnalyticField::scalar(move |p| b(p).dot(&x(p)))
}

/// i_X ω as a covector field: (i_X ω)(u) = ω(X, u) = ⟨w × X, u⟩.
pub fn contract_two_form(w: &VectorFn, x: &VectorFn) -> AnalyticField {
    let (w, x) = (w.clone(), x.clone());
    AnalyticField::covector(move |p| w(p).cross(&x(p)))
}

/// Pointwise squared-magnitude density of a field, for L²-Hodge norms:
/// A² for scalars, |B|² for (tangent) covectors, ⟨w, n̂⟩² for 2-forms.
pub fn hodge_norm_density(surface: AnalyticSurface, field: &AnalyticField) -> ScalarFn {
    match field {
        AnalyticField::Scalar(a) => {
            let a = a.clone();
            Arc::new(move |p| a(p) * a(p))
        }
        AnalyticField::Covector(b) | AnalyticField::Vector(b) => {
            let b = b.clone();
            Arc::new(move |p| b(p).norm_squared())
        }
        AnalyticField::TwoForm(w) => {
            let w = w.clone();
            Arc::new(move |p| {
                let d = w(p).dot(&surface.normal(surface.project(p)));
                d * d
            })
        }
    }
}
