//! Solow-Swan growth under the conformal derivative.
//!
//! Capital per worker obeys the Bernoulli equation
//! `D^ρ k + (n(t) + δ)k = sA·k^α`, with labor following `D^ρ L = γL + I`.
//! Without migration (I = 0) the growth rate is the constant γ; with migration
//! it is `n(t) = D^ρ L / L`. Both cases linearise under `Z = k^{1−α}` and are
//! solved in closed form here.

mod capital;
mod feasibility;
mod inada;
mod labor;
mod trajectory;

pub use capital::{j_terms, k_migration, k_no_migration, steady_state, y_from_k, JTerms, SteadyState};
pub use feasibility::{
    escape_time, escape_time_bisection, feasibility, z_window, FeasibilityReport, Horizon, Regime,
};
pub use inada::{check_inada, inada_condition_suite, AxisCheck, InadaReport, InadaVerdict, ProbeGrid};
pub use labor::{labor, labor_growth_rate, labor_unchecked};
pub use trajectory::{simulate, Method, Sample, SimulationOutcome, Trajectory, TruncationNote};

use crate::conformal::{transform_time, validate_rho, Truncation};
use crate::error::{invalid, Result};

/// Model constants. Field names follow the usual growth-model notation;
/// `technology` is A, `savings` is s, `migration` is I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub technology: f64,
    pub alpha: f64,
    pub savings: f64,
    pub delta: f64,
    pub gamma: f64,
    pub migration: f64,
    pub l0: f64,
    pub k0: f64,
    pub rho: f64,
    pub m: Truncation,
}

impl ModelParams {
    /// Checks the parameter invariants:
    /// `A > 0`, `s, α ∈ (0,1)`, `δ > 0`, `L₀ > 0`, `k₀ > 0`, `0 < ρ ≤ 1`,
    /// `γ ≠ 0`, and `γ > 0` whenever `I ≤ 0`.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.technology,
            self.alpha,
            self.savings,
            self.delta,
            self.gamma,
            self.migration,
            self.l0,
            self.k0,
            self.rho,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(invalid("params", "all parameters must be finite"));
        }
        if !(self.technology > 0.0) {
            return Err(invalid("A", "technology level must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.savings > 0.0 && self.savings < 1.0) {
            return Err(invalid("s", format!("must lie in (0, 1), got {}", self.savings)));
        }
        if !(self.delta > 0.0) {
            return Err(invalid("delta", "depreciation must be positive"));
        }
        if !(self.l0 > 0.0) {
            return Err(invalid("L0", "initial labor must be positive"));
        }
        if !(self.k0 > 0.0) {
            return Err(invalid("k0", "initial capital per worker must be positive"));
        }
        if self.gamma == 0.0 {
            return Err(invalid("gamma", "Malthusian rate must be nonzero"));
        }
        if self.migration <= 0.0 && self.gamma < 0.0 {
            return Err(invalid("gamma", "must be positive when I <= 0"));
        }
        validate_rho(self.rho)
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_migration(mut self, migration: f64) -> Self {
        self.migration = migration;
        self
    }

    /// `u = t^ρ/ρ` for this model's order.
    #[inline]
    pub fn u(&self, t: f64) -> f64 {
        transform_time(t, self.rho)
    }

    /// `z₁ = 1 + γL₀/I`; only meaningful for I ≠ 0.
    #[inline]
    pub fn z1(&self) -> f64 {
        1.0 + self.gamma * self.l0 / self.migration
    }
}

/// Parameter sets used for the reference figures.
pub mod presets {
    use super::ModelParams;
    use crate::conformal::Truncation;

    /// No-migration baseline: γ = 0.02, α = 0.6, δ = 0.05, s = 0.12, A = 1,
    /// k₀ = 200, L₀ = 100, I = 0.
    pub fn no_migration(rho: f64) -> ModelParams {
        ModelParams {
            technology: 1.0,
            alpha: 0.6,
            savings: 0.12,
            delta: 0.05,
            gamma: 0.02,
            migration: 0.0,
            l0: 100.0,
            k0: 200.0,
            rho,
            m: Truncation::Finite(1),
        }
    }

    /// Strong negative migration: γ = 0.14, α = 0.69, δ = 0.19, s = 0.19,
    /// A = 1, k₀ = 100, L₀ = 100, I = −19 (below −γL₀ = −14).
    pub fn negative_migration(rho: f64) -> ModelParams {
        ModelParams {
            technology: 1.0,
            alpha: 0.69,
            savings: 0.19,
            delta: 0.19,
            gamma: 0.14,
            migration: -19.0,
            l0: 100.0,
            k0: 100.0,
            rho,
            m: Truncation::Finite(1),
        }
    }
}
