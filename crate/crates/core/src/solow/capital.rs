use super::feasibility::{feasibility, Regime};
use super::labor::check_time;
use super::ModelParams;
use crate::error::{invalid, KgcdError, Result};
use crate::hypergeom::{gauss_2f1_series, HypergeomParams};
use crate::verification::quadrature_j;

/// Long-run capital and output per worker without migration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub k_inf: f64,
    pub y_inf: f64,
}

/// `k∞ = (sA/(γ+δ))^{1/(1−α)}`, `y∞ = A·k∞^α`. Only for I = 0.
pub fn steady_state(p: &ModelParams) -> Result<SteadyState> {
    p.validate()?;
    require_no_migration(p, "steady state")?;
    let k_inf = (p.savings * p.technology / (p.gamma + p.delta)).powf(1.0 / (1.0 - p.alpha));
    Ok(SteadyState {
        k_inf,
        y_inf: p.technology * k_inf.powf(p.alpha),
    })
}

fn require_no_migration(p: &ModelParams, what: &str) -> Result<()> {
    if p.migration == 0.0 {
        Ok(())
    } else {
        Err(KgcdError::Inapplicable(format!(
            "{what} applies to I = 0 only (got I = {})",
            p.migration
        )))
    }
}

/// Capital per worker without migration:
/// `k(t) = [c₁e^{−(1−α)(γ+δ)u} + sA/(γ+δ)]^{1/(1−α)}`, with the constant
/// fixed by `k(0) = k₀`, i.e. `c₁ = k₀^{1−α} − sA/(γ+δ)`.
pub fn k_no_migration(t: f64, p: &ModelParams) -> Result<f64> {
    check_time(t)?;
    p.validate()?;
    require_no_migration(p, "the no-migration closed form")?;
    if t == 0.0 {
        return Ok(p.k0);
    }
    let exponent = 1.0 - p.alpha;
    let target = p.savings * p.technology / (p.gamma + p.delta);
    let c1 = p.k0.powf(exponent) - target;
    let w = c1 * (-exponent * (p.gamma + p.delta) * p.u(t)).exp() + target;
    Ok(w.powf(1.0 / exponent))
}

/// Pieces of the migration integral J in hypergeometric form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JTerms {
    pub j0: f64,
    pub jt: f64,
    pub j: f64,
    pub z1: f64,
    pub z2: f64,
    /// Combined absolute error estimate of the two series evaluations.
    pub series_error: f64,
}

const SERIES_TOL: f64 = 1e-15;

/// `J = (1/γ)(−I/(γL₀))^{1−α}(J_t − J₀)` with
/// `J₀ = γ/((1−α)δ)·₂F₁(a,b;c;z₁)` and
/// `J_t = γe^{(1−α)δu}/((1−α)δ)·₂F₁(a,b;c;z₂(t))`,
/// where `a = α−1`, `b = (1−α)δ/γ`, `c = b+1`.
///
/// Requires strong negative migration and `0 ≤ t < t_f`, which keeps both
/// arguments in `(0, 1)`.
pub fn j_terms(t: f64, p: &ModelParams) -> Result<JTerms> {
    check_time(t)?;
    let report = feasibility(p)?;
    if report.regime != Regime::StrongNegative {
        return Err(KgcdError::Inapplicable(format!(
            "hypergeometric form needs strong negative migration, regime is {}",
            report.regime
        )));
    }
    let t_f = report.t_f.expect("strong regime has an escape time");
    if t >= t_f {
        return Err(KgcdError::Horizon { t, t_f });
    }

    let one_minus_alpha = 1.0 - p.alpha;
    let rate = one_minus_alpha * p.delta;
    let a = p.alpha - 1.0;
    let b = rate / p.gamma;
    let c = b + 1.0;
    let u = p.u(t);
    let z1 = p.z1();
    let z2 = z1 * (p.gamma * u).exp();

    let f1 = gauss_2f1_series(&HypergeomParams::new(a, b, c, z1)?, SERIES_TOL)?;
    let f2 = gauss_2f1_series(&HypergeomParams::new(a, b, c, z2)?, SERIES_TOL)?;
    for f in [&f1, &f2] {
        if f.capped && f.error_estimate > 1e-8 * f.value.abs().max(1.0) {
            return Err(KgcdError::SeriesNonConvergence {
                terms: f.terms,
                tail: f.error_estimate,
            });
        }
    }

    let j0 = p.gamma / rate * f1.value;
    let jt = p.gamma * (rate * u).exp() / rate * f2.value;
    let scale = (-p.migration / (p.gamma * p.l0)).powf(one_minus_alpha) / p.gamma;
    let series_error = scale * p.gamma / rate * (f1.error_estimate + (rate * u).exp() * f2.error_estimate);
    Ok(JTerms {
        j0,
        jt,
        j: scale * (jt - j0),
        z1,
        z2,
        series_error,
    })
}

/// `B(t) = L(t)/L₀ = ((γL₀+I)/(γL₀))e^{γu} − I/(γL₀)`.
fn labor_ratio(u: f64, p: &ModelParams) -> f64 {
    let gl0 = p.gamma * p.l0;
    (gl0 + p.migration) / gl0 * (p.gamma * u).exp() - p.migration / gl0
}

/// Capital per worker with constant migration, `k̄(t) = Z(t)^{1/(1−α)}` where
///
/// ```text
/// Z(t) = e^{(α−1)δu}·B(t)^{α−1}·[k₀^{1−α} + (1−α)sA·J(t)]
/// ```
///
/// J is taken from its hypergeometric form under strong negative migration
/// and from adaptive quadrature under mild negative migration. With I = 0 this
/// is [`k_no_migration`].
pub fn k_migration(t: f64, p: &ModelParams) -> Result<f64> {
    check_time(t)?;
    let report = feasibility(p)?;
    let j = match report.regime {
        Regime::NoMigration => return k_no_migration(t, p),
        Regime::Infeasible => {
            return Err(KgcdError::Infeasible(format!(
                "positive migration I = {} with γ = {} violates the sign constraint",
                p.migration, p.gamma
            )))
        }
        Regime::StrongNegative => {
            let t_f = report.t_f.expect("strong regime has an escape time");
            if t >= t_f {
                return Err(KgcdError::Horizon { t, t_f });
            }
            j_terms(t, p)?.j
        }
        Regime::MildNegative => quadrature_j(t, p)?,
    };
    if t == 0.0 {
        return Ok(p.k0);
    }

    let one_minus_alpha = 1.0 - p.alpha;
    let u = p.u(t);
    let bracket = p.k0.powf(one_minus_alpha) + one_minus_alpha * p.savings * p.technology * j;
    let z = (-one_minus_alpha * p.delta * u).exp()
        * labor_ratio(u, p).powf(-one_minus_alpha)
        * bracket;
    if !(z > 0.0) || !z.is_finite() {
        return Err(KgcdError::Breakdown { t, z });
    }
    Ok(z.powf(1.0 / one_minus_alpha))
}

/// Output per worker `y = A·k^α`.
pub fn y_from_k(k: f64, p: &ModelParams) -> Result<f64> {
    if !(k > 0.0) {
        return Err(invalid("k", format!("capital per worker must be positive, got {k}")));
    }
    Ok(p.technology * k.powf(p.alpha))
}
