//! TOML problem configuration.
//!
//! A config has a `[problem]` table tagged by `kind` and an optional
//! `[settings]` table. Unknown keys are rejected and every number must be
//! finite; sizes are capped so a config cannot request unbounded work.

use serde::Deserialize;

use crate::error::CliError;

pub const MAX_NODES: usize = 4001;
pub const MAX_DIM: usize = 64;
pub const MAX_TENSOR: usize = 1 << 20;
pub const MAX_STEPS: usize = 10_000_000;
pub const MAX_SAMPLES: usize = 1_000_000;
pub const MAX_TERMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub tol: Option<f64>,
    pub bound_tol: Option<f64>,
    pub max_steps: Option<usize>,
    pub start_offset: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    ScalarProfile(ScalarProfileConfig),
    Multilinear(MultilinearConfig),
    HammersteinC(HammersteinConfig),
    HammersteinLp(HammersteinLpConfig),
    Urysohn(DemoIntegralConfig),
    Composition(DemoIntegralConfig),
}

impl ProblemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::ScalarProfile(_) => "scalar_profile",
            ProblemSpec::Multilinear(_) => "multilinear",
            ProblemSpec::HammersteinC(_) => "hammerstein_c",
            ProblemSpec::HammersteinLp(_) => "hammerstein_lp",
            ProblemSpec::Urysohn(_) => "urysohn",
            ProblemSpec::Composition(_) => "composition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarProfileConfig {
    pub a: f64,
    pub radius: f64,
    pub modulus: ModulusConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusConfig {
    Constant { q: f64 },
    /// `[[coefficient, exponent], ...]`
    PowerSum { terms: Vec<[f64; 2]> },
    Tabulated { r: Vec<f64>, k: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultilinearConfig {
    pub dim: usize,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub eta: Vec<f64>,
    pub norm: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub radius: f64,
    pub center: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub interval: [f64; 2],
    pub nodes: usize,
    /// `simpson` or `trapezoid`; defaults by node parity.
    pub rule: Option<String>,
}

/// Exactly one of the fields selects the source.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub demo: Option<String>,
    /// Rows indexed by `t`, columns by `s`, on the solve grid.
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Inline CSV text in either kernel layout.
    pub csv: Option<String>,
    /// CSV file, relative to the config file.
    pub csv_file: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub demo: Option<String>,
    pub constant: Option<f64>,
    /// Samples on the solve grid.
    pub values: Option<Vec<f64>>,
}

/// A demo scalar function, or samples `y(x)` joined linearly and extended
/// by constants.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub demo: Option<String>,
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub kernel: KernelConfig,
    pub nonlinearity: NonlinearityConfig,
    /// Defaults to the demo's modulus, or the largest slope of a table.
    pub modulus: Option<ModulusConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HammersteinConfig {
    pub grid: GridConfig,
    pub lambda: f64,
    pub radius: f64,
    pub center: Option<FunctionConfig>,
    pub forcing: FunctionConfig,
    pub terms: Vec<TermConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpTermConfig {
    pub kernel: KernelConfig,
    pub nonlinearity: NonlinearityConfig,
    /// `q` of the superposition operator `L_p -> L_q`.
    pub inner_exponent: f64,
    /// `[[xi_norm, eta], ...]`
    pub pairs: Vec<[f64; 2]>,
    /// Estimated from the kernel when absent.
    pub zaanen_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HammersteinLpConfig {
    pub grid: GridConfig,
    pub lambda: f64,
    pub radius: f64,
    pub p: f64,
    pub center: Option<FunctionConfig>,
    pub forcing: FunctionConfig,
    pub terms: Vec<LpTermConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoIntegralConfig {
    pub demo: String,
    pub grid: GridConfig,
    pub radius: f64,
    pub center: Option<FunctionConfig>,
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be finite, got {v}")))
    }
}

fn all_finite(name: &str, vs: &[f64]) -> Result<(), CliError> {
    vs.iter().try_for_each(|v| finite(name, *v))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn capped(name: &str, v: usize, max: usize) -> Result<(), CliError> {
    if v > max {
        Err(CliError::Config(format!("{name} = {v} exceeds the limit {max}")))
    } else {
        Ok(())
    }
}

impl ProblemConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: ProblemConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Schema checks that need no numerics: finiteness, sizes, selectors.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.settings;
        if let Some(t) = s.tol {
            positive("settings.tol", t)?;
        }
        if let Some(t) = s.bound_tol {
            positive("settings.bound_tol", t)?;
        }
        if let Some(o) = s.start_offset {
            finite("settings.start_offset", o)?;
        }
        capped("settings.max_steps", s.max_steps.unwrap_or(0), MAX_STEPS)?;
        if let Some(n) = s.samples {
            capped("settings.samples", n, MAX_SAMPLES)?;
            if n < 2 {
                return Err(CliError::Config("settings.samples must be at least 2".into()));
            }
        }
        match &self.problem {
            ProblemSpec::ScalarProfile(c) => {
                finite("a", c.a)?;
                positive("radius", c.radius)?;
                c.modulus.validate()
            }
            ProblemSpec::Multilinear(c) => {
                capped("dim", c.dim, MAX_DIM)?;
                capped("degree", c.degree, 16)?;
                capped("coefficients", c.coefficients.len(), MAX_TENSOR)?;
                all_finite("coefficients", &c.coefficients)?;
                all_finite("eta", &c.eta)?;
                if let Some(n) = c.norm {
                    finite("norm", n)?;
                }
                if let Some(x0) = &c.center {
                    all_finite("center", x0)?;
                }
                positive("radius", c.radius)
            }
            ProblemSpec::HammersteinC(c) => {
                c.grid.validate()?;
                finite("lambda", c.lambda)?;
                positive("radius", c.radius)?;
                c.forcing.validate("forcing")?;
                if let Some(x0) = &c.center {
                    x0.validate("center")?;
                }
                capped("terms", c.terms.len(), MAX_TERMS)?;
                for t in &c.terms {
                    t.kernel.validate()?;
                    t.nonlinearity.validate()?;
                    if let Some(m) = &t.modulus {
                        m.validate()?;
                    }
                }
                Ok(())
            }
            ProblemSpec::HammersteinLp(c) => {
                c.grid.validate()?;
                finite("lambda", c.lambda)?;
                positive("radius", c.radius)?;
                finite("p", c.p)?;
                c.forcing.validate("forcing")?;
                if let Some(x0) = &c.center {
                    x0.validate("center")?;
                }
                capped("terms", c.terms.len(), MAX_TERMS)?;
                for t in &c.terms {
                    t.kernel.validate()?;
                    t.nonlinearity.validate()?;
                    finite("inner_exponent", t.inner_exponent)?;
                    capped("pairs", t.pairs.len(), MAX_TERMS)?;
                    for p in &t.pairs {
                        all_finite("pairs", p)?;
                    }
                    if let Some(z) = t.zaanen_norm {
                        finite("zaanen_norm", z)?;
                    }
                }
                Ok(())
            }
            ProblemSpec::Urysohn(c) | ProblemSpec::Composition(c) => {
                c.grid.validate()?;
                positive("radius", c.radius)?;
                if let Some(x0) = &c.center {
                    x0.validate("center")?;
                }
                Ok(())
            }
        }
    }
}

impl ModulusConfig {
    fn validate(&self) -> Result<(), CliError> {
        match self {
            ModulusConfig::Constant { q } => finite("modulus.q", *q),
            ModulusConfig::PowerSum { terms } => {
                capped("modulus.terms", terms.len(), MAX_TERMS)?;
                terms.iter().try_for_each(|t| all_finite("modulus.terms", t))
            }
            ModulusConfig::Tabulated { r, k } => {
                capped("modulus.r", r.len(), MAX_SAMPLES)?;
                all_finite("modulus.r", r)?;
                all_finite("modulus.k", k)
            }
        }
    }
}

impl GridConfig {
    fn validate(&self) -> Result<(), CliError> {
        all_finite("grid.interval", &self.interval)?;
        capped("grid.nodes", self.nodes, MAX_NODES)?;
        match self.rule.as_deref() {
            None | Some("simpson") | Some("trapezoid") => Ok(()),
            Some(other) => Err(CliError::Config(format!("unknown quadrature rule {other:?}"))),
        }
    }
}

fn one_source(name: &str, set: &[bool]) -> Result<(), CliError> {
    match set.iter().filter(|b| **b).count() {
        1 => Ok(()),
        n => Err(CliError::Config(format!("{name} needs exactly one source, got {n}"))),
    }
}

impl KernelConfig {
    fn validate(&self) -> Result<(), CliError> {
        one_source(
            "kernel",
            &[self.demo.is_some(), self.matrix.is_some(), self.csv.is_some(), self.csv_file.is_some()],
        )?;
        if let Some(m) = &self.matrix {
            capped("kernel.matrix rows", m.len(), MAX_NODES)?;
            for row in m {
                capped("kernel.matrix columns", row.len(), MAX_NODES)?;
                all_finite("kernel.matrix", row)?;
            }
        }
        Ok(())
    }
}

impl FunctionConfig {
    fn validate(&self, name: &str) -> Result<(), CliError> {
        one_source(name, &[self.demo.is_some(), self.constant.is_some(), self.values.is_some()])?;
        if let Some(c) = self.constant {
            finite(name, c)?;
        }
        if let Some(v) = &self.values {
            capped(name, v.len(), MAX_NODES)?;
            all_finite(name, v)?;
        }
        Ok(())
    }
}

impl NonlinearityConfig {
    fn validate(&self) -> Result<(), CliError> {
        match (&self.demo, &self.x, &self.y) {
            (Some(_), None, None) => Ok(()),
            (None, Some(x), Some(y)) => {
                capped("nonlinearity.x", x.len(), MAX_SAMPLES)?;
                all_finite("nonlinearity.x", x)?;
                all_finite("nonlinearity.y", y)?;
                if x.len() != y.len() || x.len() < 2 {
                    return Err(CliError::Config(
                        "nonlinearity.x and .y need equal lengths of at least 2".into(),
                    ));
                }
                if x.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
                    return Err(CliError::Config("nonlinearity.x must increase strictly".into()));
                }
                Ok(())
            }
            _ => Err(CliError::Config(
                "nonlinearity needs either `demo` or both `x` and `y`".into(),
            )),
        }
    }
}
