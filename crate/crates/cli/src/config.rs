//! Job configuration: a JSON file, overridden field by field by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Transform,
    Convolve,
    Resolvent,
    Fracpow,
    Specfun,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Balakrishnan integral of -S_μ.
    Balakrishnan,
    /// Spectral multiplier y^{2α}.
    Spectral,
    /// (1 - S_μ)^n J^α (1 - S_μ)^{-n}.
    Extended,
    /// Power of -Δ_μ through the similarity with -S_μ.
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SpecialFunction {
    BesselJ,
    BesselJScaled,
    MacdonaldK,
    MacdonaldKScaled,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AlphaConfig {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub log: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

/// One input or several; `"builtin:gauss"` and `["a.csv", "b.csv"]` are both accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Inputs {
    One(String),
    Many(Vec<String>),
}

impl Inputs {
    pub fn into_vec(self) -> Vec<String> {
        match self {
            Inputs::One(s) => vec![s],
            Inputs::Many(v) => v,
        }
    }
}

/// The JSON job file. Every field is optional here; [`Job::resolve`] checks
/// that the chosen command has what it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Option<Command>,
    pub mu: Option<f64>,
    pub alpha: Option<AlphaConfig>,
    /// Integer order of the Balakrishnan integrand; defaults to ⌊Re α⌋ + 1.
    pub m: Option<usize>,
    pub route: Option<Route>,
    pub lambda: Option<f64>,
    pub input: Option<Inputs>,
    pub function: Option<SpecialFunction>,
    pub nu: Option<f64>,
    pub criteria: Option<Vec<usize>>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    pub output: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

/// Flags mirroring the JSON keys; anything given here wins over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON job file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub route: Option<Route>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// `builtin:NAME` or a CSV path; repeat for convolve.
    #[arg(long, global = true)]
    pub input: Vec<String>,
    #[arg(long, global = true, value_enum)]
    pub function: Option<SpecialFunction>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Criteria to run (verify); all when absent.
    #[arg(long, global = true, value_delimiter = ',')]
    pub criteria: Vec<usize>,
    #[arg(long, global = true)]
    pub grid_min: Option<f64>,
    #[arg(long, global = true)]
    pub grid_max: Option<f64>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    #[arg(long, global = true)]
    pub grid_log: Option<bool>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_subdivisions: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, mut c: JobConfig) -> JobConfig {
        fn set<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                slot.clone_from(v);
            }
        }
        set(&mut c.mu, &self.mu);
        set(&mut c.m, &self.m);
        set(&mut c.route, &self.route);
        set(&mut c.lambda, &self.lambda);
        set(&mut c.function, &self.function);
        set(&mut c.nu, &self.nu);
        set(&mut c.output, &self.output);
        set(&mut c.grid.min, &self.grid_min);
        set(&mut c.grid.max, &self.grid_max);
        set(&mut c.grid.points, &self.grid_points);
        set(&mut c.grid.log, &self.grid_log);
        set(&mut c.quad.rel_tol, &self.rel_tol);
        set(&mut c.quad.abs_tol, &self.abs_tol);
        set(&mut c.quad.max_subdivisions, &self.max_subdivisions);
        if self.alpha_re.is_some() || self.alpha_im.is_some() {
            let base = c.alpha.unwrap_or_default();
            c.alpha = Some(AlphaConfig { re: self.alpha_re.unwrap_or(base.re), im: self.alpha_im.unwrap_or(base.im) });
        }
        if !self.input.is_empty() {
            c.input = Some(Inputs::Many(self.input.clone()));
        }
        if !self.criteria.is_empty() {
            c.criteria = Some(self.criteria.clone());
        }
        c
    }
}
