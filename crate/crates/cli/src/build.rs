//! Turns a validated config into an operator handle.

use std::path::Path;

use majfix_core::discretize::{Grid, KernelTable, QuadratureRule};
use majfix_core::zoo::{
    self, build_composition_c, build_hammerstein_c, build_hammerstein_lp, build_multilinear,
    build_superposition_modulus, build_urysohn_c, estimate_zaanen_norms, HammersteinSpec,
    HammersteinTerm, LipschitzPairSet, MultilinearSpec, ScalarFn,
};
use majfix_core::{LipschitzModulus, MajorantProfile, OperatorHandle, PowerTerm};

use crate::config::{
    FunctionConfig, GridConfig, KernelConfig, ModulusConfig, NonlinearityConfig, ProblemConfig,
    ProblemSpec, Settings,
};
use crate::demo;
use crate::error::CliError;

pub const ZAANEN_ITERS: usize = 50;

/// A built problem: the operator and what the reports need besides it.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: &'static str,
    pub handle: OperatorHandle,
    /// `(C, m)` for multilinear problems, used for the critical offset.
    pub multilinear: Option<(f64, usize)>,
    pub settings: Settings,
}

impl Problem {
    pub fn profile(&self) -> &MajorantProfile {
        self.handle.profile()
    }
}

pub fn modulus(c: &ModulusConfig) -> Result<LipschitzModulus, CliError> {
    Ok(match c {
        ModulusConfig::Constant { q } => LipschitzModulus::constant(*q)?,
        ModulusConfig::PowerSum { terms } => {
            LipschitzModulus::power_sum(terms.iter().map(|[c, e]| PowerTerm::new(*c, *e)).collect())?
        }
        ModulusConfig::Tabulated { r, k } => LipschitzModulus::tabulated(r.clone(), k.clone())?,
    })
}

fn grid(c: &GridConfig) -> Result<Grid, CliError> {
    let [a, b] = c.interval;
    Ok(match c.rule.as_deref() {
        Some("simpson") => Grid::new(a, b, c.nodes, QuadratureRule::Simpson)?,
        Some("trapezoid") => Grid::new(a, b, c.nodes, QuadratureRule::Trapezoid)?,
        _ => Grid::with_default_rule(a, b, c.nodes)?,
    })
}

fn samples(c: &FunctionConfig, g: &Grid, name: &str) -> Result<Vec<f64>, CliError> {
    if let Some(d) = &c.demo {
        return Ok(g.sample(demo::function(d)?));
    }
    if let Some(v) = c.constant {
        return Ok(vec![v; g.len()]);
    }
    let values = c.values.clone().unwrap_or_default();
    if values.len() != g.len() {
        return Err(CliError::Config(format!(
            "{name} has {} values, grid has {} nodes",
            values.len(),
            g.len()
        )));
    }
    Ok(values)
}

fn center(c: &Option<FunctionConfig>, g: &Grid) -> Result<Option<Vec<f64>>, CliError> {
    c.as_ref().map(|c| samples(c, g, "center")).transpose()
}

fn kernel(c: &KernelConfig, g: &Grid, base: &Path) -> Result<KernelTable, CliError> {
    let table = if let Some(d) = &c.demo {
        let f = demo::kernel(d)?;
        KernelTable::from_fn(g, g, |t, s| f(t, s))?
    } else if let Some(m) = &c.matrix {
        if m.len() != g.len() || m.iter().any(|row| row.len() != g.len()) {
            return Err(CliError::Config(format!(
                "kernel matrix must be {n} x {n} to match the grid",
                n = g.len()
            )));
        }
        KernelTable::new(g.clone(), g.clone(), m.concat())?
    } else {
        let text = match (&c.csv, &c.csv_file) {
            (Some(text), _) => text.clone(),
            (_, Some(file)) => std::fs::read_to_string(base.join(file))
                .map_err(|e| CliError::Config(format!("cannot read kernel file {file:?}: {e}")))?,
            _ => unreachable!("validated: one kernel source"),
        };
        KernelTable::from_csv(&text, Some(g.rule()))?
    };
    if table.rows() != g || table.cols() != g {
        return Err(CliError::Config("kernel nodes do not match the solve grid".into()));
    }
    Ok(table)
}

fn nonlinearity(
    c: &NonlinearityConfig,
    m: Option<&ModulusConfig>,
) -> Result<(ScalarFn, LipschitzModulus), CliError> {
    let (f, default) = match (&c.demo, &c.x, &c.y) {
        (Some(d), _, _) => demo::nonlinearity(d)?,
        (None, Some(x), Some(y)) => {
            let (f, slope) = demo::table_nonlinearity(x.clone(), y.clone());
            (f, LipschitzModulus::constant(slope)?)
        }
        _ => unreachable!("validated: one nonlinearity source"),
    };
    let w = match m {
        Some(m) => modulus(m)?,
        None => default,
    };
    Ok((f, w))
}

pub fn build(config: &ProblemConfig, base: &Path) -> Result<Problem, CliError> {
    config.validate()?;
    let mut multilinear = None;
    let handle = match &config.problem {
        ProblemSpec::ScalarProfile(c) => {
            let profile = MajorantProfile::new(c.a, modulus(&c.modulus)?, c.radius)?;
            zoo::self_majorizing(&profile)?
        }
        ProblemSpec::Multilinear(c) => {
            let spec = MultilinearSpec {
                dim: c.dim,
                degree: c.degree,
                coefficients: c.coefficients.clone(),
                eta: c.eta.clone(),
                norm: c.norm,
                center: c.center.clone(),
                seed: c.seed,
            };
            multilinear = Some((zoo::effective_norm(&spec)?, c.degree));
            build_multilinear(&spec, c.radius)?
        }
        ProblemSpec::HammersteinC(c) => {
            let g = grid(&c.grid)?;
            let terms = c
                .terms
                .iter()
                .map(|t| {
                    let (f, w) = nonlinearity(&t.nonlinearity, t.modulus.as_ref())?;
                    Ok(HammersteinTerm {
                        kernel: kernel(&t.kernel, &g, base)?,
                        nonlinearity: f,
                        modulus: w,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let spec = HammersteinSpec {
                lambda: c.lambda,
                terms,
                forcing: samples(&c.forcing, &g, "forcing")?,
                center: center(&c.center, &g)?,
            };
            build_hammerstein_c(&spec, &g, c.radius)?
        }
        ProblemSpec::HammersteinLp(c) => {
            let g = grid(&c.grid)?;
            let mut terms = Vec::with_capacity(c.terms.len());
            let mut moduli = Vec::with_capacity(c.terms.len());
            let mut exponents = Vec::with_capacity(c.terms.len());
            for t in &c.terms {
                let (f, _) = nonlinearity(&t.nonlinearity, None)?;
                let pairs = LipschitzPairSet::new(t.pairs.iter().map(|[x, e]| (*x, *e)).collect())?;
                moduli.push(build_superposition_modulus(
                    &pairs,
                    c.p,
                    t.inner_exponent,
                    g.length(),
                    c.radius,
                )?);
                exponents.push(t.inner_exponent);
                terms.push(HammersteinTerm {
                    kernel: kernel(&t.kernel, &g, base)?,
                    nonlinearity: f,
                    modulus: LipschitzModulus::constant(0.0)?,
                });
            }
            let spec = HammersteinSpec {
                lambda: c.lambda,
                terms,
                forcing: samples(&c.forcing, &g, "forcing")?,
                center: center(&c.center, &g)?,
            };
            let estimated = if c.terms.iter().any(|t| t.zaanen_norm.is_none()) {
                estimate_zaanen_norms(&spec, &exponents, c.p, ZAANEN_ITERS)?
            } else {
                vec![0.0; c.terms.len()]
            };
            let norms: Vec<f64> = c
                .terms
                .iter()
                .zip(estimated)
                .map(|(t, e)| t.zaanen_norm.unwrap_or(e))
                .collect();
            build_hammerstein_lp(&spec, &moduli, &norms, c.p, &g, c.radius)?
        }
        ProblemSpec::Urysohn(c) => {
            let g = grid(&c.grid)?;
            let spec = demo::urysohn(&c.demo, center(&c.center, &g)?)?;
            build_urysohn_c(&spec, &g, c.radius)?
        }
        ProblemSpec::Composition(c) => {
            let g = grid(&c.grid)?;
            let spec = demo::composition(&c.demo, center(&c.center, &g)?)?;
            build_composition_c(&spec, &g, c.radius)?
        }
    };
    Ok(Problem {
        kind: config.problem.kind(),
        handle,
        multilinear,
        settings: config.settings.clone(),
    })
}
