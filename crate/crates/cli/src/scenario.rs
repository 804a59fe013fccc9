use std::path::Path;

use kgcd_core::conformal::Truncation;
use kgcd_core::solow::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Scenario file contents. Keys follow the model notation (`A`, `I`, `L0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(rename = "A")]
    pub technology: f64,
    pub alpha: f64,
    #[serde(rename = "s")]
    pub savings: f64,
    pub delta: f64,
    pub gamma: f64,
    #[serde(rename = "I")]
    pub migration: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    pub k0: f64,
    pub rho_values: Vec<f64>,
    pub t_max: f64,
    pub n_samples: usize,
    /// Truncation index of the operator; irrelevant for the closed forms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Stem for output files; defaults to the scenario file's stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.rho_values.is_empty() {
            return Err(CliError::Usage("rho_values is empty".into()));
        }
        if let Some(rho) = self.rho_values.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return Err(CliError::Usage(format!("rho {rho} outside (0, 1]")));
        }
        if self.n_samples < 2 {
            return Err(CliError::Usage(format!("n_samples must be >= 2, got {}", self.n_samples)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(CliError::Usage(format!("t_max must be positive, got {}", self.t_max)));
        }
        for &rho in &self.rho_values {
            self.params(rho).validate()?;
        }
        Ok(())
    }

    pub fn params(&self, rho: f64) -> ModelParams {
        ModelParams {
            technology: self.technology,
            alpha: self.alpha,
            savings: self.savings,
            delta: self.delta,
            gamma: self.gamma,
            migration: self.migration,
            l0: self.l0,
            k0: self.k0,
            rho,
            m: self.m.map_or(Truncation::default(), Truncation::Finite),
        }
    }

    /// Uniform grid `t_i = i·t_max/(n−1)`.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.n_samples - 1) as f64;
        (0..self.n_samples)
            .map(|i| self.t_max * i as f64 / last)
            .collect()
    }
}
