use super::labor::{check_time, labor_unchecked};
use super::ModelParams;
use crate::error::{invalid, KgcdError, Result};

/// Migration regime, by comparing I with −γL₀ and 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// I = 0.
    NoMigration,
    /// −γL₀ ≤ I < 0: labor stays positive for all time.
    MildNegative,
    /// I < −γL₀: labor reaches zero at a finite escape time.
    StrongNegative,
    /// I > 0, excluded by the sign of the (−I/(γL₀))^{1−α} factor.
    Infeasible,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::NoMigration => "no_migration",
            Regime::MildNegative => "mild_negative",
            Regime::StrongNegative => "strong_negative",
            Regime::Infeasible => "infeasible",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Half-open time interval `[0, end)` on which the closed forms hold;
/// `end = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub end: Option<f64>,
}

impl Horizon {
    pub fn contains(&self, t: f64) -> bool {
        t >= 0.0 && self.end.map_or(true, |end| t < end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub regime: Regime,
    pub t_f: Option<f64>,
    /// Both hypergeometric arguments lie inside the unit disc on the horizon.
    pub series_valid: bool,
    pub valid_horizon: Horizon,
}

pub fn feasibility(p: &ModelParams) -> Result<FeasibilityReport> {
    p.validate()?;
    let i = p.migration;
    let threshold = -p.gamma * p.l0;
    let regime = if i == 0.0 {
        Regime::NoMigration
    } else if i > 0.0 {
        Regime::Infeasible
    } else if i >= threshold {
        Regime::MildNegative
    } else {
        Regime::StrongNegative
    };
    let t_f = match regime {
        Regime::StrongNegative => Some(escape_time_formula(p)),
        _ => None,
    };
    let valid_horizon = match regime {
        Regime::Infeasible => Horizon { end: Some(0.0) },
        _ => Horizon { end: t_f },
    };
    Ok(FeasibilityReport {
        regime,
        t_f,
        series_valid: regime == Regime::StrongNegative,
        valid_horizon,
    })
}

fn escape_time_formula(p: &ModelParams) -> f64 {
    (p.rho / p.gamma * (1.0 / p.z1()).ln()).powf(1.0 / p.rho)
}

/// Escape time `t_f = [(ρ/γ)·ln(1/z₁)]^{1/ρ}`, the positive root of `L(t) = 0`.
/// Only defined in the strong negative migration regime.
pub fn escape_time(p: &ModelParams) -> Result<f64> {
    let report = feasibility(p)?;
    report.t_f.ok_or_else(|| {
        KgcdError::Inapplicable(format!(
            "no finite escape time in the {} regime",
            report.regime
        ))
    })
}

/// Root of the raw labor expression by bisection, to absolute width `tol`.
/// Independent of [`escape_time`]; used to validate it.
pub fn escape_time_bisection(p: &ModelParams, tol: f64) -> Result<f64> {
    let report = feasibility(p)?;
    if report.regime != Regime::StrongNegative {
        return Err(KgcdError::Inapplicable(format!(
            "labor has no root in the {} regime",
            report.regime
        )));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while labor_unchecked(hi, p) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(KgcdError::NotFinite { t: hi });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if labor_unchecked(mid, p) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Hypergeometric arguments `(z₁, z₂(t))` with `z₂(t) = z₁e^{γu}`.
pub fn z_window(t: f64, p: &ModelParams) -> Result<(f64, f64)> {
    check_time(t)?;
    p.validate()?;
    if p.migration == 0.0 {
        return Err(KgcdError::Inapplicable(
            "hypergeometric arguments need nonzero migration".into(),
        ));
    }
    let z1 = p.z1();
    Ok((z1, z1 * (p.gamma * p.u(t)).exp()))
}
