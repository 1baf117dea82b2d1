//! Convergence experiments: build a refinement ladder, discretize inputs,
//! apply the operator under test, compare against the discretized analytic
//! solution, and fit log₁₀-log₁₀ slopes.

use crate::cochain::{discretize, error_norms, error_norms_masked, flat, Cochain};
use crate::fields::{self, AnalyticField, VectorFn};
use crate::mesh::PolygonMesh;
use crate::meshgen::refinement_sequence_with;
use crate::operators::{
    codifferential, contraction, hodge_inner_product, hodge_star, laplacian, lie_derivative, wedge,
    Scheme,
};

use super::catalog::FormCatalog;
use super::config::{ExperimentConfig, ExperimentOperator};
use super::HarnessError;

/// Resolution for the parameter-space quadrature behind the analytic
/// L²-Hodge norms.
const NORM_INTEGRAL_RESOLUTION: usize = 128;

#[derive(Debug, Clone, Copy)]
pub struct LevelRow {
    pub level: usize,
    pub resolution: usize,
    pub h: f64,
    pub num_vertices: usize,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    /// Root-mean-square residual of the log₁₀ fit.
    pub residual: f64,
}

/// Least-squares line through (log₁₀ x, log₁₀ err).
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit, HarnessError> {
    if points.len() < 3 {
        return Err(HarnessError::InsufficientPoints {
            got: points.len(),
            why: "need at least 3 points",
        });
    }
    if points.iter().any(|&(x, e)| x <= 0.0 || e <= 0.0) {
        return Err(HarnessError::InsufficientPoints {
            got: points.len(),
            why: "log-log fit needs positive coordinates",
        });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, e)| (x.log10(), e.log10())).collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(HarnessError::InsufficientPoints {
            got: points.len(),
            why: "abscissae are collinear",
        });
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (logs
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit { slope, residual })
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub summary: String,
    pub rows: Vec<LevelRow>,
    /// Levels that failed, with the error text.
    pub failures: Vec<(usize, String)>,
    pub l2_vs_h: Option<SlopeFit>,
    pub linf_vs_h: Option<SlopeFit>,
    pub l2_vs_vertices: Option<SlopeFit>,
    pub linf_vs_vertices: Option<SlopeFit>,
}

impl ExperimentReport {
    fn fit_all(summary: String, rows: Vec<LevelRow>, failures: Vec<(usize, String)>) -> Self {
        let fit = |xs: &dyn Fn(&LevelRow) -> f64, es: &dyn Fn(&LevelRow) -> f64| {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (xs(r), es(r))).collect();
            fit_slope(&pts).ok()
        };
        let l2_vs_h = fit(&|r| r.h, &|r| r.l2);
        let linf_vs_h = fit(&|r| r.h, &|r| r.linf);
        let l2_vs_vertices = fit(&|r| r.num_vertices as f64, &|r| r.l2);
        let linf_vs_vertices = fit(&|r| r.num_vertices as f64, &|r| r.linf);
        Self {
            summary,
            rows,
            failures,
            l2_vs_h,
            linf_vs_h,
            l2_vs_vertices,
            linf_vs_vertices,
        }
    }

    /// Geometric mean of the last up-to-3 levels' L2 errors (the plateau
    /// level of a non-converging study).
    pub fn plateau_l2(&self) -> Option<f64> {
        if self.rows.is_empty() {
            return None;
        }
        let tail = &self.rows[self.rows.len().saturating_sub(3)..];
        if tail.iter().any(|r| r.l2 <= 0.0) {
            return None;
        }
        let log_mean = tail.iter().map(|r| r.l2.ln()).sum::<f64>() / tail.len() as f64;
        Some(log_mean.exp())
    }

    /// Slope of the last up-to-3 levels against log h (plateau detection).
    pub fn tail_slope_l2_vs_h(&self) -> Option<SlopeFit> {
        let tail = &self.rows[self.rows.len().saturating_sub(3)..];
        let pts: Vec<(f64, f64)> = tail.iter().map(|r| (r.h, r.l2)).collect();
        fit_slope(&pts).ok()
    }

    /// CSV with `#` metadata lines followed by `level,h,nV,l2,linf` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.summary));
        let slope_line = |name: &str, fit: &Option<SlopeFit>| match fit {
            Some(f) => format!("# {name}: slope={:.6} residual={:.6}\n", f.slope, f.residual),
            None => format!("# {name}: undefined\n"),
        };
        out.push_str(&slope_line("l2_vs_h", &self.l2_vs_h));
        out.push_str(&slope_line("linf_vs_h", &self.linf_vs_h));
        out.push_str(&slope_line("l2_vs_vertices", &self.l2_vs_vertices));
        out.push_str(&slope_line("linf_vs_vertices", &self.linf_vs_vertices));
        for (level, err) in &self.failures {
            out.push_str(&format!("# level {level} failed: {err}\n"));
        }
        out.push_str("level,h,nV,l2,linf\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12e},{},{:.12e},{:.12e}\n",
                r.level, r.h, r.num_vertices, r.l2, r.linf
            ));
        }
        out
    }

    /// Whitespace-separated table for gnuplot, same content as the CSV.
    pub fn to_gnuplot(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {}\n# level h nV l2 linf\n", self.summary));
        for r in &self.rows {
            out.push_str(&format!(
                "{} {:.12e} {} {:.12e} {:.12e}\n",
                r.level, r.h, r.num_vertices, r.l2, r.linf
            ));
        }
        out
    }
}

enum ResolvedInput {
    Form(AnalyticField),
    Field(VectorFn),
}

fn resolve_inputs(config: &ExperimentConfig) -> Result<Vec<ResolvedInput>, HarnessError> {
    let needs_vector = matches!(
        config.operator,
        ExperimentOperator::Contraction(_) | ExperimentOperator::Lie(_)
    );
    let mut out = Vec::new();
    for (i, name) in config.forms.iter().enumerate() {
        let is_vector_slot = needs_vector && i + 1 == config.forms.len();
        let (home, input) = if is_vector_slot {
            let (home, f) = FormCatalog::vector_field(name)?;
            (home, ResolvedInput::Field(f))
        } else {
            let (home, f) = FormCatalog::form(name)?;
            (home, ResolvedInput::Form(f))
        };
        if let Some(home) = home {
            if home != config.surface {
                return Err(HarnessError::SurfaceMismatch {
                    form: name.clone(),
                });
            }
        }
        out.push(input);
    }
    Ok(out)
}

fn as_scalar(f: &AnalyticField) -> Result<&crate::fields::ScalarFn, HarnessError> {
    match f {
        AnalyticField::Scalar(s) => Ok(s),
        _ => Err(HarnessError::Config(format!("expected a scalar field, got {}", f.kind_name()))),
    }
}

fn as_proxy(f: &AnalyticField) -> Result<&VectorFn, HarnessError> {
    match f {
        AnalyticField::Covector(v) | AnalyticField::TwoForm(v) | AnalyticField::Vector(v) => Ok(v),
        _ => Err(HarnessError::Config(format!("expected a vector-proxy field, got {}", f.kind_name()))),
    }
}

/// Per-level outcome: either cochain errors or a pair of scalars.
fn run_level(
    mesh: &PolygonMesh,
    config: &ExperimentConfig,
    inputs: &[ResolvedInput],
    norm_reference: Option<f64>,
) -> Result<(f64, f64), HarnessError> {
    use ExperimentOperator::*;
    let quad = &config.quadrature;
    let surface = config.surface;
    let form = |i: usize| -> Result<&AnalyticField, HarnessError> {
        match &inputs[i] {
            ResolvedInput::Form(f) => Ok(f),
            ResolvedInput::Field(_) => Err(HarnessError::Config("vector field in a form slot".into())),
        }
    };
    let vector = |i: usize| -> Result<&VectorFn, HarnessError> {
        match &inputs[i] {
            ResolvedInput::Field(f) => Ok(f),
            ResolvedInput::Form(f) => as_proxy(f),
        }
    };
    let norms = |xi: &Cochain, reference: &AnalyticField, degree: usize| -> Result<(f64, f64), HarnessError> {
        let expected = discretize(reference, mesh, degree, quad)?;
        if config.interior_only {
            let mask = mesh.interior_cell_mask(degree);
            Ok(error_norms_masked(mesh, xi, &expected, &mask)?)
        } else {
            Ok(error_norms(mesh, xi, &expected)?)
        }
    };
    match config.operator {
        Identity(k) => {
            let c = discretize(form(0)?, mesh, k, quad)?;
            Ok(error_norms(mesh, &c, &c)?)
        }
        // HodgeNorm below compares scalars; the mask does not apply there
        Wedge01 => {
            let a = discretize(form(0)?, mesh, 0, quad)?;
            let b = discretize(form(1)?, mesh, 1, quad)?;
            let xi = wedge(mesh, &a, &b)?;
            let reference = fields::scalar_times_covector(as_scalar(form(0)?)?, as_proxy(form(1)?)?);
            norms(&xi, &reference, 1)
        }
        Wedge02 => {
            let a = discretize(form(0)?, mesh, 0, quad)?;
            let w = discretize(form(1)?, mesh, 2, quad)?;
            let xi = wedge(mesh, &a, &w)?;
            let reference = fields::scalar_times_two_form(as_scalar(form(0)?)?, as_proxy(form(1)?)?);
            norms(&xi, &reference, 2)
        }
        Wedge11 => {
            let b = discretize(form(0)?, mesh, 1, quad)?;
            let g = discretize(form(1)?, mesh, 1, quad)?;
            let xi = wedge(mesh, &b, &g)?;
            let reference = fields::covector_wedge(as_proxy(form(0)?)?, as_proxy(form(1)?)?);
            norms(&xi, &reference, 2)
        }
        Star(k) => {
            let input = form(0)?;
            let c = discretize(input, mesh, k, quad)?;
            let xi = hodge_star(mesh, k)?.apply(&c)?;
            let reference = match k {
                0 => fields::star_scalar(surface, as_scalar(input)?),
                1 => fields::star_covector(surface, as_proxy(input)?),
                2 => fields::star_two_form(surface, as_proxy(input)?),
                _ => return Err(HarnessError::Config(format!("bad star degree {k}"))),
            };
            norms(&xi, &reference, 2 - k)
        }
        HodgeNorm(k, scheme) => {
            let c = discretize(form(0)?, mesh, k, quad)?;
            let value = hodge_inner_product(mesh, &c, &c, scheme)?;
            let reference = norm_reference.expect("norm reference precomputed");
            let err = (value - reference).abs();
            Ok((err, err))
        }
        Contraction(k) => {
            let input = form(0)?;
            let x = vector(1)?;
            let x_flat = flat(x, mesh, quad)?;
            let c = discretize(input, mesh, k, quad)?;
            let xi = contraction(mesh, &x_flat, &c)?;
            let reference = match k {
                1 => fields::contract_covector(as_proxy(input)?, x),
                2 => fields::contract_two_form(as_proxy(input)?, x),
                _ => return Err(HarnessError::Config(format!("bad contraction degree {k}"))),
            };
            norms(&xi, &reference, k - 1)
        }
        Lie(k) => {
            let input = form(0)?;
            if !FormCatalog::lie_derivative_vanishes(&config.forms[0], &config.forms[1]) {
                return Err(HarnessError::NoAnalyticReference {
                    operator: config.operator.token(),
                    form: config.forms[0].clone(),
                });
            }
            let x = vector(1)?;
            let x_flat = flat(x, mesh, quad)?;
            let c = discretize(input, mesh, k, quad)?;
            let xi = lie_derivative(mesh, &x_flat, &c)?;
            let reference = AnalyticField::zero_of_degree(k);
            norms(&xi, &reference, k)
        }
        Delta(k, scheme) => {
            let input = form(0)?;
            let reference = FormCatalog::analytic_codifferential(&config.forms[0]).ok_or_else(|| {
                HarnessError::NoAnalyticReference {
                    operator: config.operator.token(),
                    form: config.forms[0].clone(),
                }
            })?;
            let c = discretize(input, mesh, k, quad)?;
            let xi = codifferential(mesh, k, scheme)?.apply(&c)?;
            norms(&xi, &reference, k - 1)
        }
        Laplacian0(scheme) => {
            let input = form(0)?;
            let reference = FormCatalog::analytic_laplacian(&config.forms[0]).ok_or_else(|| {
                HarnessError::NoAnalyticReference {
                    operator: config.operator.token(),
                    form: config.forms[0].clone(),
                }
            })?;
            let c = discretize(input, mesh, 0, quad)?;
            let xi = laplacian(mesh, 0, scheme)?.apply(&c)?;
            norms(&xi, &reference, 0)
        }
    }
}

/// Run the full ladder; per-level failures are recorded and the report is
/// assembled from the levels that succeeded.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let inputs = resolve_inputs(config)?;
    let norm_reference = match config.operator {
        ExperimentOperator::HodgeNorm(_, _) => {
            let f = match &inputs[0] {
                ResolvedInput::Form(f) => f,
                ResolvedInput::Field(_) => {
                    return Err(HarnessError::Config("vector field in a form slot".into()))
                }
            };
            let density = fields::hodge_norm_density(config.surface, f);
            Some(config.surface.integrate(&*density, NORM_INTEGRAL_RESOLUTION))
        }
        _ => None,
    };
    let seq = refinement_sequence_with(
        config.surface,
        config.sphere_scheme,
        config.protocol,
        &config.ladder,
        config.seed,
    )?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (level, mesh) in seq.meshes.iter().enumerate() {
        match run_level(mesh, config, &inputs, norm_reference) {
            Ok((l2, linf)) => rows.push(LevelRow {
                level,
                resolution: config.ladder[level],
                h: mesh.spacing().map_err(crate::meshgen::MeshGenError::Mesh)?.mean,
                num_vertices: mesh.num_vertices(),
                l2,
                linf,
            }),
            Err(e) => failures.push((level, e.to_string())),
        }
    }
    Ok(ExperimentReport::fit_all(config.summary(), rows, failures))
}

/// Side-by-side scheme comparison with per-level and plateau ratios
/// (each scheme's errors relative to the first scheme).
#[derive(Debug)]
pub struct ComparisonReport {
    pub schemes: Vec<Scheme>,
    pub reports: Vec<ExperimentReport>,
    /// level_l2_ratios[s][level] = l2(scheme s) / l2(scheme 0).
    pub level_l2_ratios: Vec<Vec<f64>>,
    pub plateau_l2: Vec<Option<f64>>,
    /// plateau_ratio[s] = plateau(s) / plateau(0).
    pub plateau_ratios: Vec<Option<f64>>,
}

pub fn compare_schemes(config: &ExperimentConfig, schemes: &[Scheme]) -> Result<ComparisonReport, HarnessError> {
    if schemes.is_empty() {
        return Err(HarnessError::Config("compare_schemes needs at least one scheme".into()));
    }
    let mut reports = Vec::new();
    for &scheme in schemes {
        let operator = config.operator.with_scheme(scheme).ok_or_else(|| {
            HarnessError::Config(format!(
                "operator {} has no scheme variants to compare",
                config.operator.token()
            ))
        })?;
        let mut c = config.clone();
        c.operator = operator;
        reports.push(run_convergence(&c)?);
    }
    let base = &reports[0];
    let level_l2_ratios: Vec<Vec<f64>> = reports
        .iter()
        .map(|rep| {
            rep.rows
                .iter()
                .filter_map(|r| {
                    base.rows
                        .iter()
                        .find(|b| b.level == r.level)
                        .map(|b| if b.l2 > 0.0 { r.l2 / b.l2 } else { f64::NAN })
                })
                .collect()
        })
        .collect();
    let plateau_l2: Vec<Option<f64>> = reports.iter().map(|r| r.plateau_l2()).collect();
    let plateau_ratios: Vec<Option<f64>> = plateau_l2
        .iter()
        .map(|p| match (p, plateau_l2[0]) {
            (Some(p), Some(b)) if b > 0.0 => Some(p / b),
            _ => None,
        })
        .collect();
    Ok(ComparisonReport {
        schemes: schemes.to_vec(),
        reports,
        level_l2_ratios,
        plateau_l2,
        plateau_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen::MeshProtocol;
    use crate::surface::AnalyticSurface;

    #[test]
    fn fit_slope_exact_powers() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 3.0 * i as f64)).collect();
        let f = fit_slope(&pts).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        let pts: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 0.5 * (i as f64).powi(2))).collect();
        let f = fit_slope(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_slope_on_noisy_linear_data() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let pts: Vec<(f64, f64)> = (1..=12)
            .map(|i| {
                let x = 2.0f64.powi(i);
                let noise = 1.0 + rng.gen_range(-0.02..0.02);
                (x, 0.1 * x * noise)
            })
            .collect();
        let f = fit_slope(&pts).unwrap();
        assert!((f.slope - 1.0).abs() < 0.05, "slope {}", f.slope);
        assert!(f.residual > 0.0);
    }

    #[test]
    fn fit_slope_rejects_bad_input() {
        assert!(fit_slope(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)]).is_err());
    }

    #[test]
    fn identity_experiment_has_zero_errors() {
        let config = ExperimentConfig::new(
            AnalyticSurface::Plane,
            MeshProtocol::Regular,
            vec![4, 6, 8],
            ExperimentOperator::Identity(1),
            &["plane-trig-b1"],
        );
        let report = run_convergence(&config).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.failures.is_empty());
        for r in &report.rows {
            assert_eq!((r.l2, r.linf), (0.0, 0.0));
        }
        assert!(report.l2_vs_h.is_none(), "zero errors admit no log fit");
    }

    #[test]
    fn surface_mismatch_is_rejected() {
        let config = ExperimentConfig::new(
            AnalyticSurface::Sphere,
            MeshProtocol::Regular,
            vec![4, 6, 8],
            ExperimentOperator::Star(0),
            &["plane-trig-a0"],
        );
        assert!(matches!(
            run_convergence(&config),
            Err(HarnessError::SurfaceMismatch { .. })
        ));
    }

    #[test]
    fn lie_without_reference_is_rejected() {
        let config = ExperimentConfig::new(
            AnalyticSurface::Plane,
            MeshProtocol::Regular,
            vec![4, 6, 8],
            ExperimentOperator::Lie(1),
            &["plane-trig-b1", "rotation-z"],
        );
        let report = run_convergence(&config).unwrap();
        assert_eq!(report.rows.len(), 0);
        assert_eq!(report.failures.len(), 3);
    }

    #[test]
    fn wedge_converges_on_a_small_planar_ladder() {
        let config = ExperimentConfig::new(
            AnalyticSurface::Plane,
            MeshProtocol::Regular,
            vec![8, 12, 16, 24],
            ExperimentOperator::Wedge01,
            &["plane-trig-a0", "plane-trig-b1"],
        );
        let report = run_convergence(&config).unwrap();
        assert!(report.failures.is_empty());
        let slope = report.l2_vs_h.unwrap().slope;
        assert!(slope > 0.8, "slope {slope}");
    }

    #[test]
    fn reports_are_byte_stable() {
        let config = ExperimentConfig::new(
            AnalyticSurface::Sphere,
            MeshProtocol::Jitter { r: 0.3 },
            vec![4, 6, 8],
            ExperimentOperator::Star(2),
            &["sphere-rot-w2"],
        )
        .with_seed(42);
        let a = run_convergence(&config).unwrap().to_csv();
        let b = run_convergence(&config).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.contains("level,h,nV,l2,linf"));
    }

    #[test]
    fn identical_scheme_comparison_has_unit_ratio() {
        let config = ExperimentConfig::new(
            AnalyticSurface::Plane,
            MeshProtocol::Regular,
            vec![6, 8, 12],
            ExperimentOperator::Delta(1, Scheme::Ours),
            &["plane-codiff-b1"],
        );
        let cmp = compare_schemes(&config, &[Scheme::Ours, Scheme::Ours]).unwrap();
        for r in &cmp.level_l2_ratios[1] {
            assert!((r - 1.0).abs() < 1e-14);
        }
        assert!((cmp.plateau_ratios[1].unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn comparison_rejects_schemeless_operators() {
        let config = ExperimentConfig::new(
            AnalyticSurface::Plane,
            MeshProtocol::Regular,
            vec![6, 8, 12],
            ExperimentOperator::Wedge01,
            &["plane-trig-a0", "plane-trig-b1"],
        );
        assert!(compare_schemes(&config, &[Scheme::Ours, Scheme::Aw]).is_err());
    }
}
