//! Experiment configuration: a flat TOML file.
//!
//! ```toml
//! objective = "paper-f"        # paper-f | signal-s | quadratic-<d> | rastrigin-<d>
//! variant = "basic"            # basic | tolerance | baseline
//! J = 20
//! p = 1.0
//! q = 1.0
//! lambda = 0.2
//! gamma = 0.9
//! L = 5.0                      # or "estimate"; omitted = objective's own bound, else estimate
//! tolm = 1e-4
//! tolmerge = 1e-3
//! tolres = 1e-4
//! init = "left-cluster"        # uniform-random | equidistant | left-cluster
//! seed = 0
//! repeats = 1
//! max_iterations = 200
//! out = "out"
//! sweep.p = [1.0, 2.0, 3.0]
//! sweep.q = [1.0, 2.0, 3.0]
//! sweep.J = [10, 20, 50]
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use sbgd_core::objective::{estimate_lipschitz, objective_by_name};
use sbgd_core::{InitScheme, Objective, SbgdParams, Variant};
use serde::Deserialize;

use crate::error::{CliError, Result};

const DEFAULT_LIPSCHITZ_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum LipschitzSpec {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    p: Option<Vec<f64>>,
    q: Option<Vec<f64>>,
    #[serde(rename = "J")]
    agents: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    objective: String,
    dim: Option<usize>,
    variant: Option<String>,
    #[serde(rename = "J")]
    agents: Option<usize>,
    p: Option<f64>,
    q: Option<f64>,
    lambda: Option<f64>,
    gamma: Option<f64>,
    #[serde(rename = "L")]
    lipschitz: Option<LipschitzSpec>,
    #[serde(rename = "L_exact")]
    lipschitz_exact: Option<bool>,
    lipschitz_samples: Option<usize>,
    tolm: Option<f64>,
    tolmerge: Option<f64>,
    tolres: Option<f64>,
    init: Option<String>,
    seed: Option<u64>,
    repeats: Option<usize>,
    max_iterations: Option<usize>,
    max_shrinks: Option<u32>,
    oracle_resolution: Option<f64>,
    out: Option<PathBuf>,
    sweep: Option<SweepFile>,
}

/// How the gradient Lipschitz bound is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum LipschitzSource {
    Fixed {
        value: f64,
        exact: bool,
    },
    Estimate {
        samples: usize,
    },
    /// The objective's own bound if it has one, otherwise an estimate.
    Objective,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSpec {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub agents: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective_name: String,
    pub dim: usize,
    pub params: SbgdParams,
    pub lipschitz: LipschitzSource,
    pub repeats: usize,
    pub sweep: Option<SweepSpec>,
    pub oracle_resolution: Option<f64>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse { source, .. } => CliError::Parse {
                path: path.to_owned(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Parse {
            path: PathBuf::from("<inline>"),
            source: Box::new(e),
        })?;
        Self::from_file(file)
    }

    fn from_file(f: ConfigFile) -> Result<Self> {
        let defaults = SbgdParams::default();
        let variant = parse_enum::<Variant>("variant", f.variant.as_deref(), defaults.variant)?;
        let init = parse_enum::<InitScheme>("init", f.init.as_deref(), defaults.init)?;
        let lipschitz_samples = f.lipschitz_samples.unwrap_or(DEFAULT_LIPSCHITZ_SAMPLES);
        let lipschitz = match f.lipschitz {
            None => LipschitzSource::Objective,
            Some(LipschitzSpec::Value(value)) => LipschitzSource::Fixed {
                value,
                exact: f.lipschitz_exact.unwrap_or(false),
            },
            Some(LipschitzSpec::Keyword(k)) if k == "estimate" => LipschitzSource::Estimate {
                samples: lipschitz_samples,
            },
            Some(LipschitzSpec::Keyword(k)) => {
                return Err(CliError::config(
                    "L",
                    format!("expected a number or \"estimate\", got \"{k}\""),
                ))
            }
        };
        let params = SbgdParams {
            agents: f.agents.unwrap_or(defaults.agents),
            p: f.p.unwrap_or(defaults.p),
            q: f.q.unwrap_or(defaults.q),
            lambda: f.lambda.unwrap_or(defaults.lambda),
            gamma: f.gamma.unwrap_or(defaults.gamma),
            lipschitz: match lipschitz {
                LipschitzSource::Fixed { value, .. } => value,
                _ => defaults.lipschitz,
            },
            lipschitz_exact: matches!(lipschitz, LipschitzSource::Fixed { exact: true, .. }),
            tolm: f.tolm.unwrap_or(defaults.tolm),
            tolmerge: f.tolmerge.unwrap_or(defaults.tolmerge),
            tolres: f.tolres.unwrap_or(defaults.tolres),
            max_iterations: f.max_iterations,
            max_shrinks: f.max_shrinks.unwrap_or(defaults.max_shrinks),
            init,
            seed: f.seed.unwrap_or(defaults.seed),
            variant,
        };
        let sweep = f.sweep.map(|s| SweepSpec {
            p: s.p.unwrap_or_else(|| vec![params.p]),
            q: s.q.unwrap_or_else(|| vec![params.q]),
            agents: s.agents.unwrap_or_else(|| vec![params.agents]),
        });
        let config = ExperimentConfig {
            objective_name: f.objective,
            dim: f.dim.unwrap_or(1),
            params,
            lipschitz,
            repeats: f.repeats.unwrap_or(1),
            sweep,
            oracle_resolution: f.oracle_resolution,
            output_dir: f.out.unwrap_or_else(|| PathBuf::from("out")),
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks every field, including each sweep value, against the
    /// optimizer's parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(CliError::config("repeats", "must be >= 1"));
        }
        if self.dim == 0 {
            return Err(CliError::config("dim", "must be >= 1"));
        }
        if let Some(r) = self.oracle_resolution {
            if !(r > 0.0) {
                return Err(CliError::config("oracle_resolution", "must be > 0"));
            }
        }
        if let LipschitzSource::Estimate { samples } = self.lipschitz {
            if samples < 2 {
                return Err(CliError::config("lipschitz_samples", "must be >= 2"));
            }
        }
        objective_by_name(&self.objective_name, self.dim)
            .map_err(|e| CliError::config("objective", e.to_string()))?;
        check_params("", &self.params)?;
        if let Some(s) = &self.sweep {
            if s.p.is_empty() || s.q.is_empty() || s.agents.is_empty() {
                return Err(CliError::config("sweep", "sweep lists must be non-empty"));
            }
            for &p in &s.p {
                check_params(
                    "sweep.p",
                    &SbgdParams {
                        p,
                        ..self.params.clone()
                    },
                )?;
            }
            for &q in &s.q {
                check_params(
                    "sweep.q",
                    &SbgdParams {
                        q,
                        ..self.params.clone()
                    },
                )?;
            }
            for &agents in &s.agents {
                check_params(
                    "sweep.J",
                    &SbgdParams {
                        agents,
                        ..self.params.clone()
                    },
                )?;
            }
        }
        Ok(())
    }

    /// Resolves the objective and fills in the Lipschitz bound.
    pub fn resolve(&self) -> Result<(Objective, SbgdParams)> {
        let objective = objective_by_name(&self.objective_name, self.dim)
            .map_err(|e| CliError::config("objective", e.to_string()))?;
        let mut params = self.params.clone();
        let estimate = |samples| estimate_lipschitz(&objective, samples, self.params.seed);
        match self.lipschitz {
            LipschitzSource::Fixed { value, exact } => {
                params.lipschitz = value;
                params.lipschitz_exact = exact;
            }
            LipschitzSource::Estimate { samples } => {
                params.lipschitz = estimate(samples)?;
                params.lipschitz_exact = false;
            }
            LipschitzSource::Objective => match objective.lipschitz() {
                Some(l) => {
                    params.lipschitz = l;
                    params.lipschitz_exact = objective.lipschitz_exact();
                }
                None => {
                    params.lipschitz = estimate(DEFAULT_LIPSCHITZ_SAMPLES)?;
                    params.lipschitz_exact = false;
                }
            },
        }
        Ok((objective, params))
    }
}

fn parse_enum<T: std::str::FromStr>(field: &str, raw: Option<&str>, default: T) -> Result<T> {
    match raw {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| CliError::config(field, format!("unknown value \"{s}\""))),
    }
}

fn check_params(prefix: &str, params: &SbgdParams) -> Result<()> {
    params.validate().map_err(|e| match e {
        sbgd_core::SbgdError::Parameter { name, reason } => {
            let field = if prefix.is_empty() {
                name.to_string()
            } else {
                prefix.to_string()
            };
            CliError::config(field, reason)
        }
        other => CliError::Optimizer(other),
    })
}
