//! Experiment configuration and the flat `key = value` config-file format.
//!
//! Recognized keys:
//!
//! * `surface`   — `plane` | `sphere` | `torus`
//! * `protocol`  — `regular` | `jitter:R` | `unstructure:F`
//! * `ladder`    — comma-separated resolutions, strictly increasing
//! * `operator`  — see [`ExperimentOperator::parse`]
//! * `forms`     — comma-separated catalog names (inputs first, then the
//!   vector field for contraction/Lie experiments)
//! * `scheme`    — `ours` | `aw` (optional; overrides the operator suffix)
//! * `seed`      — RNG seed (default 0)
//! * `quadrature`— `EDGE_ORDER,TRIANGLE_DEGREE` (default `4,4`)
//! * `sphere_scheme` — `cube` | `hex` sphere meshing (default `cube`)
//! * `interior_only` — `true` restricts error norms to cells away from the
//!   mesh boundary (default `false`)
//!
//! Lines starting with `#` are comments.

use std::path::Path;

use crate::cochain::QuadratureSpec;
use crate::meshgen::{MeshProtocol, SphereScheme};
use crate::operators::Scheme;
use crate::surface::AnalyticSurface;

use super::HarnessError;

/// Operator under test in a convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExperimentOperator {
    /// Discretize, do nothing, compare with itself (zero-error pipeline check).
    Identity(usize),
    /// 0-form ∧ 1-form.
    Wedge01,
    /// 0-form ∧ 2-form.
    Wedge02,
    /// 1-form ∧ 1-form.
    Wedge11,
    /// ⋆_k.
    Star(usize),
    /// Discrete L²-Hodge norm of a k-form against the analytic integral.
    HodgeNorm(usize, Scheme),
    /// i_X on k-forms, k ∈ {1, 2}.
    Contraction(usize),
    /// L_X on k-forms.
    Lie(usize),
    /// δ_k.
    Delta(usize, Scheme),
    /// Δ₀.
    Laplacian0(Scheme),
}

impl ExperimentOperator {
    pub fn parse(token: &str) -> Result<Self, HarnessError> {
        use ExperimentOperator::*;
        Ok(match token {
            "identity0" => Identity(0),
            "identity1" => Identity(1),
            "identity2" => Identity(2),
            "wedge01" => Wedge01,
            "wedge02" => Wedge02,
            "wedge11" => Wedge11,
            "star0" => Star(0),
            "star1" => Star(1),
            "star2" => Star(2),
            "norm0" => HodgeNorm(0, Scheme::Ours),
            "norm1" => HodgeNorm(1, Scheme::Ours),
            "norm2" => HodgeNorm(2, Scheme::Ours),
            "norm0_aw" => HodgeNorm(0, Scheme::Aw),
            "norm1_aw" => HodgeNorm(1, Scheme::Aw),
            "contract1" => Contraction(1),
            "contract2" => Contraction(2),
            "lie0" => Lie(0),
            "lie1" => Lie(1),
            "lie2" => Lie(2),
            "delta1" => Delta(1, Scheme::Ours),
            "delta2" => Delta(2, Scheme::Ours),
            "delta1_aw" => Delta(1, Scheme::Aw),
            "lap0" => Laplacian0(Scheme::Ours),
            "lap0_aw" => Laplacian0(Scheme::Aw),
            _ => return Err(HarnessError::UnknownOperator(token.to_string())),
        })
    }

    pub fn token(&self) -> String {
        use ExperimentOperator::*;
        match self {
            Identity(k) => format!("identity{k}"),
            Wedge01 => "wedge01".into(),
            Wedge02 => "wedge02".into(),
            Wedge11 => "wedge11".into(),
            Star(k) => format!("star{k}"),
            HodgeNorm(k, Scheme::Ours) => format!("norm{k}"),
            HodgeNorm(k, Scheme::Aw) => format!("norm{k}_aw"),
            Contraction(k) => format!("contract{k}"),
            Lie(k) => format!("lie{k}"),
            Delta(k, Scheme::Ours) => format!("delta{k}"),
            Delta(k, Scheme::Aw) => format!("delta{k}_aw"),
            Laplacian0(Scheme::Ours) => "lap0".into(),
            Laplacian0(Scheme::Aw) => "lap0_aw".into(),
        }
    }

    /// Number of catalog names expected in `forms` (including the trailing
    /// vector field for contraction/Lie).
    pub fn arity(&self) -> usize {
        use ExperimentOperator::*;
        match self {
            Wedge01 | Wedge02 | Wedge11 | Contraction(_) | Lie(_) => 2,
            _ => 1,
        }
    }

    /// Same operator with the scheme replaced; `None` when the operator has
    /// no scheme dimension.
    pub fn with_scheme(&self, scheme: Scheme) -> Option<Self> {
        use ExperimentOperator::*;
        match *self {
            HodgeNorm(k, _) => Some(HodgeNorm(k, scheme)),
            Delta(k, _) => Some(Delta(k, scheme)),
            Laplacian0(_) => Some(Laplacian0(scheme)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub surface: AnalyticSurface,
    /// Sphere meshing scheme (`cube` or `hex`); ignored on other surfaces.
    pub sphere_scheme: SphereScheme,
    pub protocol: MeshProtocol,
    /// Strictly increasing grid resolutions.
    pub ladder: Vec<usize>,
    pub operator: ExperimentOperator,
    pub forms: Vec<String>,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    /// Restrict error norms to interior cells (boundary-sensitive studies).
    pub interior_only: bool,
}

impl ExperimentConfig {
    pub fn new(
        surface: AnalyticSurface,
        protocol: MeshProtocol,
        ladder: Vec<usize>,
        operator: ExperimentOperator,
        forms: &[&str],
    ) -> Self {
        Self {
            surface,
            sphere_scheme: SphereScheme::Cube,
            protocol,
            ladder,
            operator,
            forms: forms.iter().map(|s| s.to_string()).collect(),
            seed: 0,
            quadrature: QuadratureSpec::default(),
            interior_only: false,
        }
    }

    pub fn with_interior_only(mut self, interior_only: bool) -> Self {
        self.interior_only = interior_only;
        self
    }

    pub fn with_sphere_scheme(mut self, scheme: SphereScheme) -> Self {
        self.sphere_scheme = scheme;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.ladder.len() < 2 || self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::Config(
                "ladder must list at least two strictly increasing resolutions".into(),
            ));
        }
        if self.forms.len() != self.operator.arity() {
            return Err(HarnessError::Config(format!(
                "operator {} expects {} form name(s), got {}",
                self.operator.token(),
                self.operator.arity(),
                self.forms.len()
            )));
        }
        Ok(())
    }

    /// One-line summary used in report metadata.
    pub fn summary(&self) -> String {
        let protocol = match self.protocol {
            MeshProtocol::Regular => "regular".to_string(),
            MeshProtocol::Jitter { r } => format!("jitter:{r}"),
            MeshProtocol::Unstructure { fraction } => format!("unstructure:{fraction}"),
        };
        let surface = match (self.surface, self.sphere_scheme) {
            (AnalyticSurface::Plane, _) => "plane",
            (AnalyticSurface::Sphere, SphereScheme::Cube) => "sphere",
            (AnalyticSurface::Sphere, SphereScheme::Hex) => "sphere(hex)",
            (AnalyticSurface::Torus { .. }, _) => "torus",
        };
        format!(
            "surface={surface} protocol={protocol} ladder={} operator={} forms={} seed={} quadrature={},{}{}",
            self.ladder.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","),
            self.operator.token(),
            self.forms.join(","),
            self.seed,
            self.quadrature.edge_order,
            self.quadrature.triangle_degree,
            if self.interior_only { " interior_only" } else { "" },
        )
    }
}

pub fn parse_surface(token: &str) -> Result<AnalyticSurface, HarnessError> {
    match token {
        "plane" => Ok(AnalyticSurface::Plane),
        "sphere" => Ok(AnalyticSurface::Sphere),
        "torus" => Ok(AnalyticSurface::standard_torus()),
        _ => Err(HarnessError::Config(format!("unknown surface {token:?}"))),
    }
}

pub fn parse_protocol(token: &str) -> Result<MeshProtocol, HarnessError> {
    if token == "regular" {
        return Ok(MeshProtocol::Regular);
    }
    if let Some(r) = token.strip_prefix("jitter:") {
        let r: f64 = r
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad jitter radius in {token:?}")))?;
        return Ok(MeshProtocol::Jitter { r });
    }
    if let Some(f) = token.strip_prefix("unstructure:") {
        let fraction: f64 = f
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad fraction in {token:?}")))?;
        return Ok(MeshProtocol::Unstructure { fraction });
    }
    Err(HarnessError::Config(format!("unknown protocol {token:?}")))
}

/// Parse the flat config-file format.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut surface = None;
    let mut sphere_scheme = SphereScheme::Cube;
    let mut protocol = MeshProtocol::Regular;
    let mut ladder = Vec::new();
    let mut operator = None;
    let mut forms = Vec::new();
    let mut seed = 0u64;
    let mut scheme_override: Option<Scheme> = None;
    let mut quadrature = QuadratureSpec::default();
    let mut interior_only = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "surface" => surface = Some(parse_surface(value)?),
            "sphere_scheme" => {
                sphere_scheme = match value {
                    "cube" => SphereScheme::Cube,
                    "hex" => SphereScheme::Hex,
                    _ => return Err(HarnessError::Config(format!("unknown sphere scheme {value:?}"))),
                };
            }
            "protocol" => protocol = parse_protocol(value)?,
            "ladder" => {
                ladder = value
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| HarnessError::Config(format!("bad ladder {value:?}")))?;
            }
            "operator" => operator = Some(ExperimentOperator::parse(value)?),
            "forms" => forms = value.split(',').map(|t| t.trim().to_string()).collect(),
            "seed" => {
                seed = value
                    .parse()
                    .map_err(|_| HarnessError::Config(format!("bad seed {value:?}")))?;
            }
            "interior_only" => {
                interior_only = value
                    .parse()
                    .map_err(|_| HarnessError::Config(format!("bad interior_only {value:?}")))?;
            }
            "scheme" => {
                scheme_override = Some(match value {
                    "ours" => Scheme::Ours,
                    "aw" => Scheme::Aw,
                    _ => return Err(HarnessError::Config(format!("unknown scheme {value:?}"))),
                });
            }
            "quadrature" => {
                let mut it = value.split(',').map(|t| t.trim().parse::<usize>());
                let edge = it
                    .next()
                    .and_then(Result::ok)
                    .ok_or_else(|| HarnessError::Config(format!("bad quadrature {value:?}")))?;
                let tri = it
                    .next()
                    .and_then(Result::ok)
                    .ok_or_else(|| HarnessError::Config(format!("bad quadrature {value:?}")))?;
                quadrature = QuadratureSpec {
                    edge_order: edge,
                    triangle_degree: tri,
                };
            }
            _ => return Err(HarnessError::Config(format!("unknown key {key:?}"))),
        }
    }
    let mut operator =
        operator.ok_or_else(|| HarnessError::Config("missing `operator` key".into()))?;
    if let Some(s) = scheme_override {
        operator = operator
            .with_scheme(s)
            .ok_or_else(|| HarnessError::Config("operator has no scheme variant".into()))?;
    }
    let config = ExperimentConfig {
        surface: surface.ok_or_else(|| HarnessError::Config("missing `surface` key".into()))?,
        sphere_scheme,
        protocol,
        ladder,
        operator,
        forms,
        seed,
        quadrature,
        interior_only,
    };
    config.validate()?;
    Ok(config)
}

pub fn parse_config_file(path: impl AsRef<Path>) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(e.to_string()))?;
    parse_config_str(&text)
}

/// The resolution ladders used by the built-in studies: five levels from
/// roughly 1k to 17k vertices.
pub fn default_ladder(surface: AnalyticSurface) -> Vec<usize> {
    match surface {
        AnalyticSurface::Plane => vec![32, 45, 64, 90, 128],
        AnalyticSurface::Sphere => vec![13, 18, 26, 37, 52],
        AnalyticSurface::Torus { .. } => vec![32, 45, 64, 90, 128],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let cfg = parse_config_str(
            "# study\nsurface = torus\nprotocol = unstructure:0.3\nladder = 16, 23, 32\noperator = star1\nforms = torus-rot-b1\nseed = 11\nquadrature = 6,5\n",
        )
        .unwrap();
        assert_eq!(cfg.ladder, vec![16, 23, 32]);
        assert_eq!(cfg.operator, ExperimentOperator::Star(1));
        assert_eq!(cfg.forms, vec!["torus-rot-b1"]);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.quadrature.edge_order, 6);
    }

    #[test]
    fn scheme_key_overrides_operator_suffix() {
        let cfg = parse_config_str(
            "surface=plane\nladder=4,8\noperator=delta1\nscheme=aw\nforms=plane-codiff-b1\n",
        )
        .unwrap();
        assert_eq!(cfg.operator, ExperimentOperator::Delta(1, Scheme::Aw));
    }

    #[test]
    fn rejects_bad_ladders_and_arity() {
        assert!(parse_config_str("surface=plane\nladder=8,4\noperator=star0\nforms=plane-trig-a0\n").is_err());
        assert!(parse_config_str("surface=plane\nladder=4,8\noperator=wedge01\nforms=plane-trig-a0\n").is_err());
        assert!(parse_config_str("surface=plane\nladder=4,8\noperator=star9\nforms=x\n").is_err());
    }

    #[test]
    fn operator_tokens_round_trip() {
        for token in [
            "identity0", "wedge01", "wedge02", "wedge11", "star0", "star1", "star2", "norm0",
            "norm1", "norm2", "norm0_aw", "norm1_aw", "contract1", "contract2", "lie0", "lie1",
            "lie2", "delta1", "delta2", "delta1_aw", "lap0", "lap0_aw",
        ] {
            let op = ExperimentOperator::parse(token).unwrap();
            assert_eq!(op.token(), token);
        }
    }
}
