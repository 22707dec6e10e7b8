//! TOML model configuration.
//!
//! ```toml
//! schema = 1
//!
//! [model]
//! c = 2.0
//! sigma = 0.0
//! lambda = 1.0
//!
//! [compounder]
//! kind = "geometric"      # degenerate | geometric | logarithmic |
//! rho = 0.5               # generalized_logarithmic | explicit_pmf
//!
//! [claims]
//! kind = "exponential"    # exponential | hyper_exponential | erlang |
//! rate = 1.0              # mixture_of_erlangs | empirical
//!
//! [control]
//! q = 0.1
//! # x_max = 60.0
//! # n = 2048
//! # method = "auto"       # auto | inversion | closed-form | talbot
//!
//! [simulate]              # optional
//! replications = 100000
//! dt = 0.01
//! seed = 42
//! # t_max = 140.0
//! # x = 1.0               # initial capital; defaults to the barrier
//! ```
//!
//! Unknown keys are rejected and every error names the offending key path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::{ClaimDistribution, CountingCompounder, EmpiricalDensity};
use crate::error::{Error, Result};
use crate::levy::RiskModel;
use crate::scale::{MethodChoice, ScaleOptions, DEFAULT_GRID_N};
use crate::sim::SimulationConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema: u32,
    pub model: ModelSection,
    pub compounder: CompounderConfig,
    pub claims: ClaimsConfig,
    pub control: ControlSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub c: f64,
    pub sigma: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompounderConfig {
    Degenerate,
    Geometric { rho: f64 },
    Logarithmic { theta: f64 },
    GeneralizedLogarithmic { beta: f64, theta: f64 },
    ExplicitPmf { probs: Vec<f64>, tail_bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClaimsConfig {
    Exponential {
        rate: f64,
    },
    HyperExponential {
        weights: Vec<f64>,
        rates: Vec<f64>,
    },
    Erlang {
        shape: u32,
        rate: f64,
    },
    MixtureOfErlangs {
        weights: Vec<f64>,
        shapes: Vec<u32>,
        rates: Vec<f64>,
    },
    Empirical {
        z: Vec<f64>,
        f: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodChoice>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub replications: usize,
    pub dt: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Domain { field, reason } => Error::Config { path: field, reason },
        other => other,
    }
}

impl CompounderConfig {
    pub fn build(&self) -> Result<CountingCompounder> {
        match self {
            CompounderConfig::Degenerate => Ok(CountingCompounder::degenerate()),
            CompounderConfig::Geometric { rho } => CountingCompounder::geometric(*rho),
            CompounderConfig::Logarithmic { theta } => CountingCompounder::logarithmic(*theta),
            CompounderConfig::GeneralizedLogarithmic { beta, theta } => {
                CountingCompounder::generalized_logarithmic(*beta, *theta)
            }
            CompounderConfig::ExplicitPmf { probs, tail_bound } => {
                CountingCompounder::explicit(probs.clone(), *tail_bound)
            }
        }
    }
}

impl ClaimsConfig {
    pub fn build(&self) -> Result<ClaimDistribution> {
        match self {
            ClaimsConfig::Exponential { rate } => ClaimDistribution::exponential(*rate),
            ClaimsConfig::HyperExponential { weights, rates } => {
                ClaimDistribution::hyper_exponential(weights.clone(), rates.clone())
            }
            ClaimsConfig::Erlang { shape, rate } => ClaimDistribution::erlang(*shape, *rate),
            ClaimsConfig::MixtureOfErlangs { weights, shapes, rates } => {
                ClaimDistribution::mixture_of_erlangs(weights.clone(), shapes.clone(), rates.clone())
            }
            ClaimsConfig::Empirical { z, f } => {
                EmpiricalDensity::new(z.clone(), f.clone()).map(ClaimDistribution::empirical)
            }
        }
    }
}

impl ModelConfig {
    /// Parse and validate a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::de::Deserializer::parse(text).map_err(|e| Error::Config {
            path: "<document>".into(),
            reason: e.to_string().trim().to_string(),
        })?;
        let cfg: ModelConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config {
                path: if path == "." { "<document>".into() } else { path },
                reason: e.into_inner().to_string().trim().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    /// Check every field against the invariants of the type it feeds.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config {
                path: "schema".into(),
                reason: format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema),
            });
        }
        self.risk_model()?;
        let bad = |path: &str, reason: String| Error::Config {
            path: path.into(),
            reason,
        };
        let c = &self.control;
        if !(c.q > 0.0 && c.q.is_finite()) {
            return Err(bad("control.q", format!("must be > 0, got {}", c.q)));
        }
        if let Some(x) = c.x_max {
            if !(x > 0.0 && x.is_finite()) {
                return Err(bad("control.x_max", format!("must be > 0, got {x}")));
            }
        }
        if let Some(n) = c.n {
            if n < 64 {
                return Err(bad("control.n", format!("must be >= 64, got {n}")));
            }
        }
        if let Some(s) = &self.simulate {
            self.simulation_config(s, None)?.validate()?;
            if let Some(x) = s.x {
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(bad("simulate.x", format!("must be >= 0, got {x}")));
                }
            }
        }
        Ok(())
    }

    pub fn risk_model(&self) -> Result<RiskModel> {
        let compounder = self.compounder.build().map_err(config_error)?;
        let claim = self.claims.build().map_err(config_error)?;
        let m = &self.model;
        RiskModel::new(m.c, m.sigma, m.lambda, compounder, claim).map_err(config_error)
    }

    /// Scale-grid options, with command-line overrides.
    pub fn scale_options(&self, n: Option<usize>, x_max: Option<f64>) -> ScaleOptions {
        ScaleOptions {
            x_max: x_max.or(self.control.x_max),
            n: n.or(self.control.n).unwrap_or(DEFAULT_GRID_N),
            method: self.control.method.unwrap_or_default(),
            ..ScaleOptions::default()
        }
    }

    pub fn simulation_config(&self, s: &SimulateSection, seed: Option<u64>) -> Result<SimulationConfig> {
        let cfg = SimulationConfig {
            replications: s.replications,
            dt: s.dt,
            t_max: s.t_max,
            seed: seed.unwrap_or(s.seed),
            q: self.control.q,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
