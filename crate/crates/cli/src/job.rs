//! A validated job and its execution.

use std::io::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use hankel_core::corpus::{builtin, BUILTIN_NAMES};
use hankel_core::fracpow::{balakrishnan_on, frac_power_delta_on, frac_power_on, frac_power_spectral, Alpha, PowerOptions};
use hankel_core::funcspace::grid::{linear_grid, log_grid};
use hankel_core::hankel::{default_output_grid, hankel_transform_on};
use hankel_core::hconv::convolve_on;
use hankel_core::resolvent::resolvent_apply;
use hankel_core::specfun::{bessel_j, bessel_j_scaled, gamma_fn, macdonald_k, macdonald_k_scaled};
use hankel_core::verify::{run_criterion, CRITERIA};
use hankel_core::{Alpha64, Complex64, Function64, Lambda64, Order64, Spec64};

use crate::config::{Command, JobConfig, Route, SpecialFunction};
use crate::csv;
use crate::error::CliError;

#[derive(Debug)]
pub enum Task {
    Transform(Function64),
    Convolve(Function64, Function64),
    Resolvent(Lambda64, Function64),
    Fracpow { alpha: Alpha64, route: Route, f: Function64 },
    Specfun { function: SpecialFunction, nu: f64 },
    Verify(Vec<usize>),
}

#[derive(Debug)]
pub struct Job {
    pub mu: Order64,
    pub task: Task,
    pub grid: Vec<f64>,
    pub spec: Spec64,
    pub output: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Core validation failures at this stage are configuration errors, not numerics.
fn invalid(e: hankel_core::Error) -> CliError {
    config_err(e.to_string())
}

fn load_input(spec: &str, mu: &Order64) -> Result<Function64, CliError> {
    let name = spec.strip_prefix("builtin:");
    match name {
        Some(n) => builtin(n, mu).map_err(invalid),
        None if BUILTIN_NAMES.contains(&spec) => builtin(spec, mu).map_err(invalid),
        None => csv::load(std::path::Path::new(spec)),
    }
}

impl Job {
    pub fn resolve(command: Command, c: JobConfig) -> Result<Self, CliError> {
        if let Some(file_cmd) = c.command {
            if file_cmd != command {
                return Err(config_err(format!("config is for '{file_cmd:?}' but '{command:?}' was requested")));
            }
        }
        let needs_mu = !matches!(command, Command::Specfun | Command::Verify);
        let mu = match c.mu {
            Some(m) => Order64::new(m).map_err(invalid)?,
            None if needs_mu => return Err(config_err("mu is required")),
            None => Order64::new(0.5).map_err(invalid)?,
        };

        let mut spec = Spec64::default();
        if let Some(v) = c.quad.rel_tol {
            spec.rel_tol = v;
        }
        if let Some(v) = c.quad.abs_tol {
            spec.abs_tol = v;
        }
        if let Some(v) = c.quad.max_subdivisions {
            spec.max_subdivisions = v;
        }
        spec.validate().map_err(invalid)?;

        let grid = match (c.grid.min, c.grid.max, c.grid.points) {
            (None, None, None) if c.grid.log != Some(false) => default_output_grid(),
            (lo, hi, n) => {
                let (lo, hi, n) = (lo.unwrap_or(1e-3), hi.unwrap_or(30.0), n.unwrap_or(256));
                if !(lo > 0.0) || !(hi > lo) || n < 2 {
                    return Err(config_err(format!("grid needs 0 < min < max and points >= 2, got [{lo}, {hi}] x {n}")));
                }
                if c.grid.log.unwrap_or(true) { log_grid(lo, hi, n) } else { linear_grid(lo, hi, n) }.map_err(invalid)?
            }
        };

        let inputs: Vec<String> = c.input.map(|i| i.into_vec()).unwrap_or_default();
        let want = match command {
            Command::Convolve => 2,
            Command::Specfun | Command::Verify => 0,
            _ => 1,
        };
        if inputs.len() != want {
            return Err(config_err(format!("{command:?} takes {want} input(s), {} given", inputs.len())));
        }
        let mut fs = inputs.iter().map(|s| load_input(s, &mu)).collect::<Result<Vec<_>, _>>()?.into_iter();
        let mut next = || fs.next().expect("input count checked");

        let task = match command {
            Command::Transform => Task::Transform(next()),
            Command::Convolve => {
                let f = next();
                Task::Convolve(f, next())
            }
            Command::Resolvent => {
                let l = c.lambda.ok_or_else(|| config_err("lambda is required"))?;
                Task::Resolvent(Lambda64::new(l).map_err(invalid)?, next())
            }
            Command::Fracpow => {
                let a = c.alpha.ok_or_else(|| config_err("alpha is required"))?;
                let value = Complex64::new(a.re, a.im);
                let alpha = match c.m {
                    Some(m) => Alpha::with_order(value, m),
                    None => Alpha::new(value),
                }
                .map_err(invalid)?;
                Task::Fracpow { alpha, route: c.route.unwrap_or(Route::Balakrishnan), f: next() }
            }
            Command::Specfun => Task::Specfun {
                function: c.function.ok_or_else(|| config_err("function is required"))?,
                nu: match c.function {
                    Some(SpecialFunction::Gamma) => c.nu.unwrap_or(0.0),
                    _ => c.nu.ok_or_else(|| config_err("nu is required"))?,
                },
            },
            Command::Verify => {
                let ids = c.criteria.unwrap_or_else(|| CRITERIA.iter().map(|c| c.0).collect());
                if let Some(bad) = ids.iter().find(|i| !CRITERIA.iter().any(|c| c.0 == **i)) {
                    return Err(config_err(format!("no criterion {bad} (expected 1..={})", CRITERIA.len())));
                }
                Task::Verify(ids)
            }
        };
        Ok(Self { mu, task, grid, spec, output: c.output })
    }

    pub fn run(&self) -> Result<(), CliError> {
        let body = match &self.task {
            Task::Verify(ids) => return self.verify(ids),
            Task::Specfun { function, nu } => {
                let ys = self
                    .grid
                    .iter()
                    .map(|&x| {
                        let v = match function {
                            SpecialFunction::BesselJ => bessel_j(*nu, x),
                            SpecialFunction::BesselJScaled => bessel_j_scaled(*nu, x),
                            SpecialFunction::MacdonaldK => macdonald_k(*nu, x),
                            SpecialFunction::MacdonaldKScaled => macdonald_k_scaled(*nu, x),
                            SpecialFunction::Gamma => gamma_fn(x),
                        };
                        v.map(|v| Complex64::new(v, 0.0)).map_err(invalid)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                csv::render(&self.grid, &ys)
            }
            task => {
                let out = self.function(task)?;
                let ys = self.grid.iter().map(|&x| out.eval(x)).collect::<Result<Vec<_>, _>>()?;
                csv::render(&self.grid, &ys)
            }
        };
        self.write(body.as_bytes())
    }

    fn function(&self, task: &Task) -> Result<Function64, CliError> {
        let (mu, xs, spec) = (&self.mu, self.grid.as_slice(), &self.spec);
        let opts = PowerOptions::default();
        Ok(match task {
            Task::Transform(f) => hankel_transform_on(mu, f, xs, spec)?,
            Task::Convolve(f, g) => convolve_on(mu, f, g, xs, spec)?,
            Task::Resolvent(l, f) => resolvent_apply(mu, *l, f, spec)?,
            Task::Fracpow { alpha, route, f } => match route {
                Route::Balakrishnan => balakrishnan_on(mu, alpha, f, xs, &opts, spec)?,
                Route::Spectral => frac_power_spectral(mu, alpha, f, spec)?,
                Route::Extended => frac_power_on(mu, alpha, f, xs, &opts, spec)?,
                Route::Delta => frac_power_delta_on(mu, alpha, f, xs, &opts, spec)?,
            },
            Task::Specfun { .. } | Task::Verify(_) => unreachable!("handled in run"),
        })
    }

    fn verify(&self, ids: &[usize]) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Entry<'a> {
            criterion: usize,
            check_name: &'a str,
            paper_ref: &'a str,
            max_error: Option<f64>,
            tolerance: f64,
            pass: bool,
            runtime_s: f64,
        }
        let mut reports = Vec::new();
        for &id in ids {
            let r = run_criterion(id, &self.spec)?;
            eprintln!("{}", r.summary_line());
            reports.push(r);
        }
        let entries: Vec<Entry> = reports
            .iter()
            .flat_map(|r| {
                r.checks.iter().map(move |c| Entry {
                    criterion: r.id,
                    check_name: &c.name,
                    paper_ref: c.paper_ref,
                    // JSON has no infinity or NaN.
                    max_error: c.max_error.is_finite().then_some(c.max_error),
                    tolerance: c.tolerance,
                    pass: c.pass,
                    runtime_s: c.runtime.as_secs_f64(),
                })
            })
            .collect();
        let mut json = serde_json::to_string_pretty(&entries).expect("report serializes");
        json.push('\n');
        self.write(json.as_bytes())?;
        match reports.iter().flat_map(|r| &r.checks).find(|c| !c.pass) {
            Some(c) => Err(CliError::Verify {
                check: c.name.clone(),
                paper_ref: c.paper_ref.to_string(),
                max_error: c.max_error,
                tolerance: c.tolerance,
            }),
            None => Ok(()),
        }
    }

    fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.output {
            Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => std::io::stdout()
                .lock()
                .write_all(bytes)
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
        }
    }
}
