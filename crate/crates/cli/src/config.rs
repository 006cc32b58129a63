//! Run configuration files.

use std::path::{Path, PathBuf};

use rhsolve::curves::{CurveFamily, FamilySpec};
use rhsolve::newton::Damping;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Disc,
    Annulus { q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingSpec {
    #[serde(default = "one")]
    pub initial_step: f64,
    #[serde(default = "six")]
    pub max_halvings: usize,
}

fn one() -> f64 {
    1.0
}

fn six() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonSpec {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub damping: Option<DampingSpec>,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    40
}

impl Default for NewtonSpec {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: default_max_iter(), damping: None }
    }
}

impl NewtonSpec {
    pub fn damping(&self) -> Damping {
        self.damping.map(|d| Damping { initial_step: d.initial_step, max_halvings: d.max_halvings }).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { directory: default_dir(), formats: default_formats() }
    }
}

/// Annulus solve strategy: the closed form for centred circles or glue + Newton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Auto,
    Radial,
    Glue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub windings: Option<Vec<i64>>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub newton: NewtonSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub method: Method,
    /// Argument of the zero of a radial solution.
    #[serde(default)]
    pub psi: f64,
    #[serde(default = "default_bound")]
    pub identity_bound: f64,
    #[serde(default)]
    pub targets: Option<Vec<f64>>,
}

fn default_grid() -> usize {
    256
}

fn default_bound() -> f64 {
    1e-6
}

/// A validated configuration with its families built.
pub struct Problem {
    pub config: RunConfig,
    pub families: Vec<CurveFamily>,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides<'a> {
    pub out: Option<&'a Path>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

pub fn load(path: &Path, o: Overrides) -> Result<Problem, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut config: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(out) = o.out {
        config.outputs.directory = out.to_path_buf();
    }
    if let Some(seed) = o.seed {
        config.seed = seed;
    }
    if let Some(grid) = o.grid {
        config.grid = grid;
    }
    if let Some(tol) = o.tol {
        config.newton.tol = tol;
    }
    validate(config)
}

fn validate(config: RunConfig) -> Result<Problem, String> {
    let components = match config.domain {
        DomainSpec::Disc => 1,
        DomainSpec::Annulus { q } => {
            if !(q > 0.0 && q < 1.0) {
                return Err(format!("annulus modulus q = {q} must lie in (0, 1)"));
            }
            2
        }
    };
    if config.families.len() != components {
        return Err(format!("expected {components} families, got {}", config.families.len()));
    }
    if let Some(w) = &config.windings {
        if w.len() != components {
            return Err(format!("expected {components} windings, got {}", w.len()));
        }
        if components == 1 && w[0] < 0 {
            return Err("disc winding must be nonnegative".into());
        }
    }
    if !config.grid.is_power_of_two() || config.grid < 16 {
        return Err(format!("grid {} must be a power of two >= 16", config.grid));
    }
    if config.newton.tol.is_nan() || config.newton.tol <= 0.0 {
        return Err("newton.tol must be positive".into());
    }
    if config.method == Method::Glue && config.windings.is_none() {
        return Err("method \"glue\" needs windings".into());
    }
    let families = config
        .families
        .iter()
        .enumerate()
        .map(|(j, f)| f.build().map_err(|e| format!("family {j}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Problem { config, families })
}
