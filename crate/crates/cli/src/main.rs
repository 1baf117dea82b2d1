//! `polydec` — mesh generation, operator export, applications, and
//! convergence studies on general polygonal meshes.

mod selftest;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use polydec::apps::{helmholtz_hodge, lie_advect, mean_curvature_flow, AdvectionConfig, AdvectionOutcome, FlowConfig};
use polydec::cochain::{flat, sharp, Cochain, QuadratureSpec};
use polydec::harness::{compare_schemes, parse_config_file, run_convergence, FormCatalog};
use polydec::io::{csv, mtx, obj, ply};
use polydec::meshgen::{gen_regular_with, jitter, unstructure, SphereScheme};
use polydec::operators::{
    codifferential, exterior_derivative, hodge_star, inner_product_matrix, laplacian, Scheme,
};
use polydec::sparse::{SolveMethod, SolveOptions};
use polydec::surface::AnalyticSurface;
use polydec::PolygonMesh;

#[derive(Parser)]
#[command(name = "polydec", version, about = "Discrete exterior calculus on polygonal meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Plane,
    Sphere,
    Torus,
}

impl From<SurfaceArg> for AnalyticSurface {
    fn from(s: SurfaceArg) -> Self {
        match s {
            SurfaceArg::Plane => AnalyticSurface::Plane,
            SurfaceArg::Sphere => AnalyticSurface::Sphere,
            SurfaceArg::Torus => AnalyticSurface::standard_torus(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SphereSchemeArg {
    Cube,
    Hex,
}

impl From<SphereSchemeArg> for SphereScheme {
    fn from(s: SphereSchemeArg) -> Self {
        match s {
            SphereSchemeArg::Cube => SphereScheme::Cube,
            SphereSchemeArg::Hex => SphereScheme::Hex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ours,
    Aw0,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ours => Scheme::Ours,
            SchemeArg::Aw0 => Scheme::Aw,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh over an analytic surface.
    Gen {
        #[arg(long, value_enum)]
        surface: SurfaceArg,
        /// Grid resolution (>= 2).
        #[arg(long)]
        res: usize,
        /// Sphere meshing scheme (cube-sphere quads or hex-dominant geodesic).
        #[arg(long, value_enum, default_value = "cube")]
        sphere_scheme: SphereSchemeArg,
        /// Tangent jitter radius, in units of the shortest edge.
        #[arg(long)]
        jitter: Option<f64>,
        /// Fraction of edges to eliminate by face merging.
        #[arg(long)]
        unstructure: Option<f64>,
        /// RNG seed (unstructuring derives seed+1 when combined with jitter).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Export an assembled operator as a Matrix Market file.
    Op {
        /// One of: d0 d1 star0 star1 star2 delta1 delta2 delta1_aw
        /// lap0 lap1 lap2 lap0_aw m0 m1 m2 m0_aw m1_aw
        #[arg(long)]
        which: String,
        #[arg(short, long)]
        mesh: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Implicit mean curvature flow.
    Mcf {
        #[arg(short, long)]
        mesh: PathBuf,
        /// Time step.
        #[arg(short = 't', long = "t")]
        time_step: f64,
        /// Iterations.
        #[arg(short = 'n', long = "n")]
        iterations: usize,
        #[arg(long, value_enum, default_value = "ours")]
        scheme: SchemeArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Two-component Helmholtz-Hodge decomposition of a 1-form.
    Hhd {
        #[arg(short, long)]
        mesh: PathBuf,
        /// `builtin:<name>` (vector field) or `csv:<file>` (1-cochain).
        #[arg(long)]
        field: String,
        /// Solver tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Lie advection of a 0- or 1-form along a fixed field.
    Advect {
        #[arg(short, long)]
        mesh: PathBuf,
        /// Advecting field: `builtin:<name>` or `csv:<file>`.
        #[arg(long)]
        field: String,
        /// Advected form: `csv:<file>` or `flat:<builtin-name>`.
        #[arg(long)]
        form: String,
        /// Cochain degree of a csv form (inferred from length if omitted).
        #[arg(long)]
        degree: Option<usize>,
        #[arg(short = 't', long = "t")]
        time_step: f64,
        #[arg(short = 'n', long = "n")]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        snapshot_every: usize,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a convergence experiment from a config file.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also emit a gnuplot-friendly data file.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
        /// Compare the operator across both schemes and print the ratios.
        #[arg(long)]
        compare: bool,
    },
    /// Run the exact-identity suite on built-in meshes.
    Selftest,
}

fn load_mesh(path: &Path) -> Result<PolygonMesh> {
    obj::read_obj(path).with_context(|| format!("reading mesh {}", path.display()))
}

/// Resolve a `builtin:<name>`/`csv:<file>` field spec into a 1-cochain.
fn resolve_one_form(spec: &str, mesh: &PolygonMesh) -> Result<Cochain> {
    let quad = QuadratureSpec::default();
    if let Some(name) = spec.strip_prefix("builtin:") {
        let (_, field) = FormCatalog::vector_field(name)?;
        Ok(flat(&field, mesh, &quad)?)
    } else if let Some(file) = spec.strip_prefix("csv:") {
        Ok(csv::read_cochain(mesh, 1, file)?)
    } else {
        bail!("field spec must be builtin:<name> or csv:<file>, got {spec:?}");
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Gen {
            surface,
            res,
            sphere_scheme,
            jitter: jitter_r,
            unstructure: unstructure_f,
            seed,
            output,
        } => {
            let surface: AnalyticSurface = surface.into();
            let mut mesh = gen_regular_with(surface, sphere_scheme.into(), res)?;
            if let Some(r) = jitter_r {
                mesh = jitter(&mesh, surface, r, seed)?;
            }
            if let Some(f) = unstructure_f {
                let s = if jitter_r.is_some() { seed.wrapping_add(1) } else { seed };
                let (m, removed) = unstructure(&mesh, f, s)?;
                eprintln!("removed {removed} edges");
                mesh = m;
            }
            obj::write_obj(&mesh, &output)?;
            println!(
                "wrote {} ({} vertices, {} edges, {} faces)",
                output.display(),
                mesh.num_vertices(),
                mesh.num_edges(),
                mesh.num_faces()
            );
        }
        Command::Op { which, mesh, output } => {
            let mesh = load_mesh(&mesh)?;
            let op = match which.as_str() {
                "d0" => exterior_derivative(&mesh, 0)?,
                "d1" => exterior_derivative(&mesh, 1)?,
                "star0" => hodge_star(&mesh, 0)?,
                "star1" => hodge_star(&mesh, 1)?,
                "star2" => hodge_star(&mesh, 2)?,
                "delta1" => codifferential(&mesh, 1, Scheme::Ours)?,
                "delta2" => codifferential(&mesh, 2, Scheme::Ours)?,
                "delta1_aw" => codifferential(&mesh, 1, Scheme::Aw)?,
                "lap0" => laplacian(&mesh, 0, Scheme::Ours)?,
                "lap1" => laplacian(&mesh, 1, Scheme::Ours)?,
                "lap2" => laplacian(&mesh, 2, Scheme::Ours)?,
                "lap0_aw" => laplacian(&mesh, 0, Scheme::Aw)?,
                "m0" => inner_product_matrix(&mesh, 0, Scheme::Ours)?,
                "m1" => inner_product_matrix(&mesh, 1, Scheme::Ours)?,
                "m2" => inner_product_matrix(&mesh, 2, Scheme::Ours)?,
                "m0_aw" => inner_product_matrix(&mesh, 0, Scheme::Aw)?,
                "m1_aw" => inner_product_matrix(&mesh, 1, Scheme::Aw)?,
                other => bail!("unknown operator {other:?}"),
            };
            mtx::write_matrix_market(op.matrix(), &output)?;
            println!(
                "wrote {} ({}x{}, {} nonzeros)",
                output.display(),
                op.matrix().nrows(),
                op.matrix().ncols(),
                op.matrix().nnz()
            );
        }
        Command::Mcf {
            mesh,
            time_step,
            iterations,
            scheme,
            output,
        } => {
            let mesh = load_mesh(&mesh)?;
            let config = FlowConfig::new(time_step, iterations).with_scheme(scheme.into());
            let result = mean_curvature_flow(&mesh, &config)?;
            obj::write_obj(result.meshes.last().unwrap(), &output)?;
            let total_iters: usize = result.reports.iter().map(|r| r.iterations).sum();
            println!(
                "wrote {} after {} flow iterations ({} solver iterations total)",
                output.display(),
                iterations,
                total_iters
            );
        }
        Command::Hhd { mesh, field, tol, output } => {
            let mesh = load_mesh(&mesh)?;
            let omega = resolve_one_form(&field, &mesh)?;
            let options = SolveOptions::new(SolveMethod::LeastSquares).with_tol(tol);
            let result = helmholtz_hodge(&mesh, &omega, &options)?;
            std::fs::create_dir_all(&output)?;
            csv::write_cochain(&result.potential, output.join("beta.csv"))?;
            csv::write_cochain(&result.rotational, output.join("delta_beta.csv"))?;
            csv::write_cochain(&result.harmonic, output.join("gamma.csv"))?;
            let rot_sharp = sharp(&result.rotational, &mesh)?;
            let harm_sharp = sharp(&result.harmonic, &mesh)?;
            csv::write_vector_field(&rot_sharp, output.join("delta_beta_sharp.csv"))?;
            csv::write_vector_field(&harm_sharp, output.join("gamma_sharp.csv"))?;
            ply::write_ply(&mesh, None, Some(&rot_sharp.vectors), output.join("delta_beta_sharp.ply"))?;
            ply::write_ply(&mesh, None, Some(&harm_sharp.vectors), output.join("gamma_sharp.ply"))?;
            // vertex potential ⋆₂β for pseudocolor inspection
            let potential = hodge_star(&mesh, 2)?.apply(&result.potential)?;
            ply::write_ply(&mesh, Some(potential.values()), None, output.join("beta_potential.ply"))?;
            println!(
                "wrote {} (solver: {} iterations, residual {:.3e}, closedness {:.3e})",
                output.display(),
                result.report.iterations,
                result.report.residual,
                result.closedness_m2
            );
        }
        Command::Advect {
            mesh,
            field,
            form,
            degree,
            time_step,
            iterations,
            snapshot_every,
            output,
        } => {
            let mesh = load_mesh(&mesh)?;
            let x_flat = resolve_one_form(&field, &mesh)?;
            let alpha0 = if let Some(name) = form.strip_prefix("flat:") {
                let (_, f) = FormCatalog::vector_field(name)?;
                flat(&f, &mesh, &QuadratureSpec::default())?
            } else if let Some(file) = form.strip_prefix("csv:") {
                let degree = match degree {
                    Some(d) => d,
                    None => infer_degree(&mesh, file)?,
                };
                csv::read_cochain(&mesh, degree, file)?
            } else {
                bail!("form spec must be csv:<file> or flat:<builtin-name>, got {form:?}");
            };
            let run = lie_advect(&mesh, &x_flat, &alpha0, &AdvectionConfig {
                time_step,
                iterations,
                snapshot_every,
            })?;
            std::fs::create_dir_all(&output)?;
            for (iter, state) in &run.snapshots {
                csv::write_cochain(state, output.join(format!("snapshot_{iter:06}.csv")))?;
                if state.degree() == 1 {
                    let s = sharp(state, &mesh)?;
                    ply::write_ply(&mesh, None, Some(&s.vectors), output.join(format!("snapshot_{iter:06}.ply")))?;
                } else {
                    ply::write_ply(&mesh, Some(state.values()), None, output.join(format!("snapshot_{iter:06}.ply")))?;
                }
            }
            match run.outcome {
                AdvectionOutcome::Completed => println!(
                    "wrote {} snapshots to {}",
                    run.snapshots.len(),
                    output.display()
                ),
                AdvectionOutcome::Blowup { at_iteration } => {
                    bail!("numerical blow-up at iteration {at_iteration}; partial snapshots written");
                }
            }
        }
        Command::Converge {
            config,
            output,
            gnuplot,
            compare,
        } => {
            let config = parse_config_file(&config)?;
            if compare {
                let cmp = compare_schemes(&config, &[Scheme::Ours, Scheme::Aw])?;
                for (scheme, report) in cmp.schemes.iter().zip(&cmp.reports) {
                    let path = output.with_extension(format!("{scheme}.csv"));
                    std::fs::write(&path, report.to_csv())?;
                    println!("wrote {}", path.display());
                }
                if let (Some(a), Some(b)) = (cmp.plateau_l2[0], cmp.plateau_l2[1]) {
                    println!("plateau l2: ours={a:.6e} aw={b:.6e} ratio aw/ours={:.3}", b / a);
                }
            } else {
                let report = run_convergence(&config)?;
                std::fs::write(&output, report.to_csv())?;
                if let Some(path) = gnuplot {
                    std::fs::write(&path, report.to_gnuplot())?;
                }
                if let Some(f) = &report.l2_vs_h {
                    println!("l2 slope vs h: {:.3} (residual {:.3})", f.slope, f.residual);
                }
                if let Some(f) = &report.l2_vs_vertices {
                    println!("l2 slope vs |V|: {:.3} (residual {:.3})", f.slope, f.residual);
                }
                println!("wrote {}", output.display());
            }
        }
        Command::Selftest => {
            let failures = selftest::run_all();
            if failures > 0 {
                bail!("{failures} selftest check(s) failed");
            }
        }
    }
    Ok(())
}

/// Infer a csv cochain's degree from its row count when cell counts are
/// unambiguous.
fn infer_degree(mesh: &PolygonMesh, file: &str) -> Result<usize> {
    let rows = std::fs::read_to_string(file)?
        .lines()
        .filter(|l| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#') && !t.starts_with("cell_index")
        })
        .count();
    let matches: Vec<usize> = (0..=2).filter(|&d| mesh.num_cells(d) == rows).collect();
    match matches.as_slice() {
        [d] => Ok(*d),
        [] => bail!("{file}: {rows} rows match no cell count of the mesh"),
        _ => bail!("{file}: ambiguous degree; pass --degree"),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
