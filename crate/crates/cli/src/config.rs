//! Experiment configuration JSON (`schema: "experiment/1"`).
//!
//! ```json
//! {
//!   "schema": "experiment/1",
//!   "data": {"generator": {"d": 2, "m": 4, "seed": 7, "norm_range": [1.0, 1.0]}},
//!   "width": 4096,
//!   "eta": "cor-max",
//!   "steps": 2000,
//!   "eps": 0.2,
//!   "trials": 20,
//!   "seed": 100,
//!   "gram": "closed",
//!   "record_gram_every": 100,
//!   "envelope": "capital-lambda"
//! }
//! ```
//!
//! `data` is either `{"path": "dataset.json"}` or an inline generator spec;
//! `eta` is a number or `"cor-max"`, which resolves to the simplified
//! certificate bound at the configured ε.

use relugd::io::check_schema;
use relugd::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Path(PathBuf),
    Generator(GeneratorSpec),
}

/// Inputs uniform on spheres with radii drawn from `norm_range`, targets
/// standard normal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(default)]
    pub schema: Option<String>,
    pub d: usize,
    pub m: usize,
    pub seed: u64,
    pub norm_range: [f64; 2],
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.schema {
            check_schema(s, "generator")?;
        }
        if self.d == 0 || self.m == 0 {
            return Err(Error::Domain("d and m must be at least 1".into()));
        }
        let [lo, hi] = self.norm_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Domain(format!(
                "norm_range must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EtaSpec {
    Value(f64),
    Named(EtaNamed),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum EtaNamed {
    /// Simplified certificate step-size bound at the configured ε.
    #[serde(rename = "cor-max")]
    CorMax,
}

impl Default for EtaSpec {
    fn default() -> Self {
        EtaSpec::Named(EtaNamed::CorMax)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GramChoice {
    #[default]
    #[value(name = "closed")]
    #[serde(rename = "closed")]
    Closed,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeChoice {
    /// Geometric envelope with the computable rate constant Λ.
    #[default]
    CapitalLambda,
    /// Geometric envelope with (λ+μ)/m.
    SumOverM,
}

fn default_trials() -> u64 {
    1
}

fn default_mc_samples() -> u64 {
    1_000_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub data: DataSource,
    pub width: usize,
    #[serde(default)]
    pub eta: EtaSpec,
    pub steps: usize,
    pub eps: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub gram: GramChoice,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default)]
    pub record_gram_every: usize,
    #[serde(default)]
    pub envelope: EnvelopeChoice,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_schema(&self.schema, "experiment")?;
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Domain(format!(
                "eps must lie in (0,1), got {}",
                self.eps
            )));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.width == 0 {
            return Err(Error::Domain("width must be at least 1".into()));
        }
        if let EtaSpec::Value(v) = self.eta {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "eta must be finite and nonnegative, got {v}"
                )));
            }
        }
        if let DataSource::Generator(g) = &self.data {
            g.validate()?;
        }
        Ok(())
    }
}
