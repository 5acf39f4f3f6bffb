//! Strict JSON run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fbpme::{Exponent, GridSpec, ModelParams, PressureSpec, SolverConfig};

/// An exponent written as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentValue {
    Number(f64),
    Text(ExponentText),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExponentText {
    #[serde(rename = "inf", alias = "infinity")]
    Inf,
}

impl ExponentValue {
    pub fn to_exponent(self) -> Result<Exponent> {
        Ok(match self {
            ExponentValue::Number(v) => Exponent::new(v)?,
            ExponentValue::Text(ExponentText::Inf) => Exponent::INFINITY,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub half_period: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.n, self.points, self.half_period)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureKindName {
    Riesz,
    ExpKernel,
    ExpKernelAttractive,
    Identity,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureConfig {
    pub kind: PressureKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Symbol CSV for `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Declared order for `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl PressureConfig {
    pub fn build(&self, grid: &GridSpec, base: &Path) -> Result<PressureSpec> {
        let spec = match self.kind {
            PressureKindName::Riesz => {
                let s = self.s.context("model.pressure.s is required for riesz")?;
                PressureSpec::riesz(s)?
            }
            PressureKindName::ExpKernel => PressureSpec::exp_kernel(),
            PressureKindName::ExpKernelAttractive => PressureSpec::exp_kernel_attractive(),
            PressureKindName::Identity => PressureSpec::identity(),
            PressureKindName::Custom => {
                let path = resolve(base, self.path.as_ref().context("model.pressure.path is required for custom")?);
                let sigma = self.sigma.context("model.pressure.sigma is required for custom")?;
                let file = std::fs::File::open(&path).with_context(|| format!("opening symbol table {}", path.display()))?;
                let table = fbpme::io::read_symbol_csv(*grid, file)
                    .with_context(|| format!("reading symbol table {}", path.display()))?;
                PressureSpec::custom(table, sigma)?
            }
        };
        if self.kind != PressureKindName::Riesz && self.s.is_some() {
            bail!("model.pressure.s only applies to riesz");
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub p: ExponentValue,
    pub q: ExponentValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub pressure: PressureConfig,
    pub norm: NormConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    March,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Time exponent of the working space.
    #[serde(default = "default_r")]
    pub r: ExponentValue,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig { max_iter: default_max_iter(), tol: default_tol(), nodes: default_nodes(), r: default_r() }
    }
}

fn default_max_iter() -> usize {
    50
}
fn default_tol() -> f64 {
    1e-10
}
fn default_nodes() -> usize {
    64
}
fn default_r() -> ExponentValue {
    ExponentValue::Number(2.0)
}
fn default_record_every() -> usize {
    1
}
fn default_ceiling() -> f64 {
    1e8
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub picard: PicardConfig,
    pub method: Method,
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default = "default_ceiling")]
    pub ceiling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Gaussian,
    BlockBump,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Gaussian width.
    #[serde(default)]
    pub width: Option<f64>,
    /// FBPM file for `file`.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Dyadic block of a `block_bump`.
    #[serde(default)]
    pub block: Option<i32>,
    #[serde(default)]
    pub seed: u64,
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub solver: SolverSection,
    pub initial_data: InitialConfig,
    pub output: OutputConfig,
}

/// Everything a run needs, resolved against the config file's directory.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub grid: GridSpec,
    pub params: ModelParams,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Deserialize with the JSON path of the offending field in the error.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("invalid {what} at `{path}`: {}", e.inner())
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(RunConfig, PathBuf)> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = parse_json(&text, "config")?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn resolve(&self, base: &Path) -> Result<Resolved> {
        let grid = self.grid.build().context("grid")?;
        let pressure = self.model.pressure.build(&grid, base).context("model.pressure")?;
        let p = self.model.norm.p.to_exponent().context("model.norm.p")?;
        let q = self.model.norm.q.to_exponent().context("model.norm.q")?;
        let params = ModelParams::new(self.model.alpha, pressure, grid.dim(), p, q).context("model")?;
        let s = &self.solver;
        let mut solver = SolverConfig::new(s.horizon);
        solver.dt = s.dt;
        solver.record_every = s.record_every;
        solver.picard_max_iter = s.picard.max_iter;
        solver.picard_tol = s.picard.tol;
        solver.picard_nodes = s.picard.nodes;
        solver.working_exponent = s.picard.r.to_exponent().context("solver.picard.r")?;
        solver.nonlinear = s.nonlinear;
        solver.ceiling = s.ceiling;
        solver.snapshots = self.output.snapshots.clone();
        solver.validate().context("solver")?;
        if s.method == Method::Picard {
            let nodes = s.picard.nodes as f64;
            for &t in &solver.snapshots {
                let x = t / s.horizon * nodes;
                if (x - x.round()).abs() > 1e-9 {
                    bail!("output.snapshots: {t} is not a Picard node (T/{} spacing)", s.picard.nodes);
                }
            }
        }
        match self.initial_data.kind {
            InitialKind::Gaussian if self.initial_data.width.is_none() => bail!("initial_data.width is required for gaussian"),
            InitialKind::File if self.initial_data.path.is_none() => bail!("initial_data.path is required for file"),
            InitialKind::File => {
                let path = resolve(base, self.initial_data.path.as_ref().expect("checked"));
                if !path.exists() {
                    bail!("initial_data.path {} does not exist", path.display());
                }
            }
            _ => {}
        }
        Ok(Resolved { grid, params, solver, output_dir: resolve(base, &self.output.dir) })
    }
}
