//! Experiment configuration: one TOML file fully determines a run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use apxgrp::cayley::SpectralOpts;
use apxgrp::families::FamilySpec;
use apxgrp::Budget;

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Matrix dimension.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Single prime, for everything except sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    /// Prime list for sweeps; falls back to `p` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_list: Option<Vec<u64>>,
    /// Default seed for families that sample.
    #[serde(default)]
    pub seed: u64,
    pub family: FamilySpec,
    #[serde(default)]
    pub knobs: Knobs,
}

fn default_n() -> usize {
    2
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Knobs {
    /// Product powers m to measure at.
    pub powers: Vec<u32>,
    /// |measured - predicted| threshold for the per-report flag.
    pub exponent_tolerance: f64,
    /// Power-iteration stop threshold on successive Rayleigh quotients.
    pub spectral_residual: f64,
    pub iteration_cap: u32,
    /// Hard cap on encoded elements any set operation may generate.
    pub element_budget: u64,
    /// Run the involved-torus census in `structure`.
    pub census: bool,
    /// Run the conjugation-invariance check in `structure`.
    pub invariance: bool,
    pub conjugators: Conjugators,
    /// Explicit regular semisimple anchor (integer rows); picked from the
    /// family automatically when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<Vec<i64>>>,
}

impl Default for Knobs {
    fn default() -> Self {
        Knobs {
            powers: vec![1, 2, 3],
            exponent_tolerance: 0.05,
            spectral_residual: 1e-8,
            iteration_cap: 100_000,
            element_budget: 50_000_000,
            census: true,
            invariance: true,
            conjugators: Conjugators::Generators,
            anchor: None,
        }
    }
}

/// Which set conjugates the involved tori in the invariance check.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Conjugators {
    Generators,
    Family,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn require_p(&self) -> Result<u64, CliError> {
        self.p
            .ok_or_else(|| CliError::Config("this subcommand needs `p`".into()))
    }

    pub fn sweep_primes(&self) -> Result<Vec<u64>, CliError> {
        match (&self.p_list, self.p) {
            (Some(list), _) => Ok(list.clone()),
            (None, Some(p)) => Ok(vec![p]),
            (None, None) => Err(CliError::Config("sweep needs `p_list` or `p`".into())),
        }
    }

    pub fn budget(&self) -> Budget {
        Budget::new(self.knobs.element_budget)
    }

    pub fn spectral_opts(&self) -> SpectralOpts {
        SpectralOpts {
            residual_tol: self.knobs.spectral_residual,
            iteration_cap: self.knobs.iteration_cap,
        }
    }
}
