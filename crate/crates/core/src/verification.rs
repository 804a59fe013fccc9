//! Independent oracles for the closed forms.
//!
//! Nothing here calls the closed forms it checks. The capital oracle
//! integrates the Bernoulli equations in transformed time (with labor carried
//! along as a second state under migration), and the J oracle integrates its
//! defining integral by adaptive quadrature.

use crate::conformal::{integrate_conformal_ivp, integrate_conformal_system, IvpOptions};
use crate::error::{KgcdError, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::solow::{feasibility, Method, ModelParams, Regime};

/// Worst relative disagreement between a closed form and an oracle path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub max_rel_error: f64,
    pub argmax_t: f64,
    pub samples_compared: usize,
    pub method_pair: (Method, Method),
}

/// Denominator floor for relative errors.
pub const REL_ERROR_FLOOR: f64 = 1e-30;

/// Compares `closed(t)` against `oracle_values` at `oracle_times`.
pub fn compare<F>(
    closed: F,
    oracle_times: &[f64],
    oracle_values: &[f64],
    method_pair: (Method, Method),
) -> Result<ComparisonReport>
where
    F: Fn(f64) -> Result<f64>,
{
    if oracle_times.is_empty() || oracle_times.len() != oracle_values.len() {
        return Err(KgcdError::InvalidGrid(format!(
            "oracle has {} times and {} values",
            oracle_times.len(),
            oracle_values.len()
        )));
    }
    let mut report = ComparisonReport {
        max_rel_error: 0.0,
        argmax_t: oracle_times[0],
        samples_compared: 0,
        method_pair,
    };
    for (&t, &reference) in oracle_times.iter().zip(oracle_values) {
        let value = closed(t)?;
        let err = (value - reference).abs() / reference.abs().max(REL_ERROR_FLOOR);
        if !(err <= report.max_rel_error) {
            report.max_rel_error = err;
            report.argmax_t = t;
        }
        report.samples_compared += 1;
    }
    Ok(report)
}

/// Capital per worker from numerical integration of the conformal Bernoulli
/// equation for the model's regime, sampled on `t_grid`.
///
/// Without migration this is `D^ρk = sAk^α − (γ+δ)k`. With migration the pair
/// `D^ρL = γL + I`, `D^ρk = sAk^α − (δ + (γL + I)/L)k` is integrated jointly.
pub fn ode_oracle(p: &ModelParams, t_grid: &[f64]) -> Result<Vec<f64>> {
    ode_oracle_with(p, t_grid, &IvpOptions::default())
}

pub fn ode_oracle_with(p: &ModelParams, t_grid: &[f64], opts: &IvpOptions) -> Result<Vec<f64>> {
    let report = feasibility(p)?;
    if report.regime == Regime::Infeasible {
        return Err(KgcdError::Infeasible(format!(
            "positive migration I = {}",
            p.migration
        )));
    }
    if let (Some(t_f), Some(&last)) = (report.t_f, t_grid.last()) {
        if last >= t_f {
            return Err(KgcdError::Horizon { t: last, t_f });
        }
    }
    if t_grid.is_empty() {
        return Err(KgcdError::InvalidGrid("empty time grid".into()));
    }

    // the initial condition lives at t = 0
    let prepend = t_grid[0] > 0.0;
    let mut grid = Vec::with_capacity(t_grid.len() + 1);
    if prepend {
        grid.push(0.0);
    }
    grid.extend_from_slice(t_grid);

    let sa = p.savings * p.technology;
    let mut path = if p.migration == 0.0 {
        let decay = p.gamma + p.delta;
        integrate_conformal_ivp(
            |_, k: f64| sa * k.powf(p.alpha) - decay * k,
            p.k0,
            p.rho,
            &grid,
            opts,
        )?
    } else {
        let (g, i, d) = (p.gamma, p.migration, p.delta);
        let rhs = |_t: f64, x: &[f64; 2]| {
            let (l, k) = (x[0], x[1]);
            let dl = g * l + i;
            [dl, sa * k.powf(p.alpha) - (d + dl / l) * k]
        };
        integrate_conformal_system(&rhs, [p.l0, p.k0], p.rho, &grid, opts)?
            .into_iter()
            .map(|x| x[1])
            .collect()
    };
    if prepend {
        path.remove(0);
    }
    Ok(path)
}

/// `J(t) = ∫₀ᵗ e^{(1−α)δτ^ρ/ρ}·B(τ)^{1−α}·τ^{ρ−1} dτ` with
/// `B = ((γL₀+I)/(γL₀))e^{γτ^ρ/ρ} − I/(γL₀)`.
///
/// Integrated in `v = τ^ρ/ρ`, which removes the `τ^{ρ−1}` endpoint
/// singularity, to an absolute tolerance of 1e−10.
pub fn quadrature_j(t: f64, p: &ModelParams) -> Result<f64> {
    quadrature_j_with_tol(t, p, 1e-10)
}

pub fn quadrature_j_with_tol(t: f64, p: &ModelParams, abs_tol: f64) -> Result<f64> {
    let report = feasibility(p)?;
    if report.regime == Regime::Infeasible {
        return Err(KgcdError::Infeasible(format!(
            "positive migration I = {}",
            p.migration
        )));
    }
    if !(t >= 0.0) {
        return Err(crate::error::invalid("t", format!("need t >= 0, got {t}")));
    }
    if let Some(t_f) = report.t_f {
        if t > t_f {
            return Err(KgcdError::Horizon { t, t_f });
        }
    }
    let gl0 = p.gamma * p.l0;
    let growth = (gl0 + p.migration) / gl0;
    let offset = -p.migration / gl0;
    let exponent = 1.0 - p.alpha;
    let integrand = |v: f64| {
        let b = growth * (p.gamma * v).exp() + offset;
        (exponent * p.delta * v).exp() * b.max(0.0).powf(exponent)
    };
    let opts = QuadOptions {
        abs_tol,
        rel_tol: 1e-15,
        max_intervals: 4000,
    };
    Ok(integrate(integrand, 0.0, p.u(t), &opts)?.value)
}
