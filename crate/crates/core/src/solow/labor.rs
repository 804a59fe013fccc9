use super::feasibility::feasibility;
use super::ModelParams;
use crate::error::{invalid, KgcdError, Result};

/// `L(t) = (L₀ + I/γ)e^{γu} − I/γ` with `u = t^ρ/ρ`, without any horizon
/// check. May be negative past the escape time.
pub fn labor_unchecked(t: f64, p: &ModelParams) -> f64 {
    let growth = (p.gamma * p.u(t)).exp();
    if p.migration == 0.0 {
        p.l0 * growth
    } else {
        let shift = p.migration / p.gamma;
        (p.l0 + shift) * growth - shift
    }
}

/// Labor force at time `t ≥ 0`. In the strong negative migration regime `t`
/// may not exceed the escape time, where labor reaches zero.
pub fn labor(t: f64, p: &ModelParams) -> Result<f64> {
    check_time(t)?;
    let report = feasibility(p)?;
    if let Some(t_f) = report.t_f {
        if t > t_f {
            return Err(KgcdError::Horizon { t, t_f });
        }
    }
    Ok(labor_unchecked(t, p).max(0.0))
}

/// Labor growth rate `n(t) = D^ρL / L = γ(γL + I) / ((γL₀ + I)e^{γu} − I)`.
/// Equal to γ without migration. Undefined at and beyond the escape time.
pub fn labor_growth_rate(t: f64, p: &ModelParams) -> Result<f64> {
    check_time(t)?;
    let report = feasibility(p)?;
    if p.migration == 0.0 {
        return Ok(p.gamma);
    }
    if let Some(t_f) = report.t_f {
        if t >= t_f {
            return Err(KgcdError::Horizon { t, t_f });
        }
    }
    let i = p.migration;
    let g = p.gamma;
    let l = labor_unchecked(t, p);
    let denominator = (g * p.l0 + i) * (g * p.u(t)).exp() - i;
    Ok(g * (g * l + i) / denominator)
}

pub(super) fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", format!("time must be finite and >= 0, got {t}")))
    }
}
