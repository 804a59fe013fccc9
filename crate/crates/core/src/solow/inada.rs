use crate::conformal::validate_rho;
use crate::error::{invalid, KgcdError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InadaVerdict {
    pub satisfied: bool,
    /// `max(α, 1−α)`; the order must exceed it strictly.
    pub threshold: f64,
}

/// Closed-form test for Cobb-Douglas production: the conformal Inada
/// conditions hold iff `ρ > max(α, 1−α)`.
pub fn check_inada(alpha: f64, rho: f64) -> Result<InadaVerdict> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    validate_rho(rho)?;
    let threshold = alpha.max(1.0 - alpha);
    Ok(InadaVerdict {
        satisfied: rho > threshold,
        threshold,
    })
}

pub const MIN_PROBES_PER_AXIS: usize = 8;

/// Probe points for the numeric suite. Every pair `(K, L)` of the two axes is
/// visited.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid {
    pub capital: Vec<f64>,
    pub labor: Vec<f64>,
}

impl ProbeGrid {
    /// `n` geometrically spaced points on `[lo, hi]` for both axes.
    pub fn geometric(lo: f64, hi: f64, n: usize) -> Self {
        let axis = geometric_sequence(lo, hi, n);
        Self {
            capital: axis.clone(),
            labor: axis,
        }
    }

    fn validate(&self) -> Result<()> {
        for axis in [&self.capital, &self.labor] {
            if axis.len() < MIN_PROBES_PER_AXIS {
                return Err(KgcdError::ProbeGridTooSmall {
                    found: axis.len(),
                    required: MIN_PROBES_PER_AXIS,
                });
            }
            if axis.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(invalid("probe grid", "probe values must be positive and finite"));
            }
        }
        Ok(())
    }
}

fn geometric_sequence(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo; n];
    }
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| lo * ratio.powi(i as i32)).collect()
}

/// Pass flags per input axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisCheck {
    pub capital: bool,
    pub labor: bool,
}

impl AxisCheck {
    pub fn both(&self) -> bool {
        self.capital && self.labor
    }
}

/// Outcome of the four conformal Inada conditions on a probe grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InadaReport {
    /// i: `K^{1−ρ}∂_K Y > 0` and `L^{1−ρ}∂_L Y > 0`.
    pub positivity: AxisCheck,
    /// ii: `Y(λK, λL) = λY(K, L)`.
    pub constant_returns: bool,
    /// iii: conformal marginal products fall monotonically over six decades.
    pub limits: AxisCheck,
    /// iv: `X^{1−2ρ}[(1−ρ)∂_X Y + X∂²_X Y] < 0` for X = K, L.
    pub concavity: AxisCheck,
}

impl InadaReport {
    pub fn all_pass(&self) -> bool {
        self.positivity.both() && self.constant_returns && self.limits.both() && self.concavity.both()
    }
}

const FD_STEP: f64 = 1e-3;
const LIMIT_PROBES: usize = 25;
const SCALE_FACTORS: [f64; 3] = [0.5, 2.0, 10.0];

#[derive(Clone, Copy)]
enum Axis {
    Capital,
    Labor,
}

/// First and second partial derivatives along one axis by central differences
/// with a relative step.
fn partials<F: Fn(f64, f64) -> f64>(y: &F, k: f64, l: f64, axis: Axis) -> (f64, f64) {
    let at = |v: f64| match axis {
        Axis::Capital => y(v, l),
        Axis::Labor => y(k, v),
    };
    let x = match axis {
        Axis::Capital => k,
        Axis::Labor => l,
    };
    let h = FD_STEP * x;
    let (lo, mid, hi) = (at(x - h), at(x), at(x + h));
    ((hi - lo) / (2.0 * h), (hi - 2.0 * mid + lo) / (h * h))
}

fn conformal_first(x: f64, d1: f64, rho: f64) -> f64 {
    x.powf(1.0 - rho) * d1
}

fn conformal_second(x: f64, d1: f64, d2: f64, rho: f64) -> f64 {
    x.powf(1.0 - 2.0 * rho) * ((1.0 - rho) * d1 + x * d2)
}

/// Checks the conformal Inada conditions numerically for an arbitrary
/// production function `(K, L) ↦ Y`.
pub fn inada_condition_suite<F>(production: &F, rho: f64, grid: &ProbeGrid) -> Result<InadaReport>
where
    F: Fn(f64, f64) -> f64,
{
    validate_rho(rho)?;
    grid.validate()?;
    let pairs = || {
        grid.capital
            .iter()
            .flat_map(|&k| grid.labor.iter().map(move |&l| (k, l)))
    };

    let mut positivity = AxisCheck {
        capital: true,
        labor: true,
    };
    let mut concavity = positivity;
    let mut constant_returns = true;
    for (k, l) in pairs() {
        let y = production(k, l);
        if !(y > 0.0) {
            return Err(invalid(
                "production",
                format!("must be positive on the probe grid, Y({k}, {l}) = {y}"),
            ));
        }
        let (dk, dkk) = partials(production, k, l, Axis::Capital);
        let (dl, dll) = partials(production, k, l, Axis::Labor);
        positivity.capital &= conformal_first(k, dk, rho) > 0.0;
        positivity.labor &= conformal_first(l, dl, rho) > 0.0;
        concavity.capital &= conformal_second(k, dk, dkk, rho) < 0.0;
        concavity.labor &= conformal_second(l, dl, dll, rho) < 0.0;
        for lambda in SCALE_FACTORS {
            let scaled = production(lambda * k, lambda * l);
            constant_returns &= (scaled - lambda * y).abs() <= 1e-9 * (lambda * y).abs();
        }
    }

    let centre = |axis: &[f64]| {
        let log_mean = axis.iter().map(|v| v.ln()).sum::<f64>() / axis.len() as f64;
        log_mean.exp()
    };
    let k_ref = centre(&grid.capital);
    let l_ref = centre(&grid.labor);
    let falls = |axis: Axis, reference: f64| {
        let values: Vec<f64> = geometric_sequence(reference * 1e-3, reference * 1e3, LIMIT_PROBES)
            .into_iter()
            .map(|x| {
                let (k, l) = match axis {
                    Axis::Capital => (x, l_ref),
                    Axis::Labor => (k_ref, x),
                };
                let (d1, _) = partials(production, k, l, axis);
                conformal_first(x, d1, rho)
            })
            .collect();
        values.iter().all(|&v| v > 0.0) && values.windows(2).all(|w| w[1] < w[0])
    };
    let limits = AxisCheck {
        capital: falls(Axis::Capital, k_ref),
        labor: falls(Axis::Labor, l_ref),
    };

    Ok(InadaReport {
        positivity,
        constant_returns,
        limits,
        concavity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cobb_douglas(alpha: f64) -> impl Fn(f64, f64) -> f64 {
        move |k: f64, l: f64| k.powf(alpha) * l.powf(1.0 - alpha)
    }

    #[test]
    fn threshold_examples() {
        let v = check_inada(0.6, 0.85).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.threshold, 0.6);
        let v = check_inada(0.5, 0.5).unwrap();
        assert!(!v.satisfied);
        let v = check_inada(0.69, 0.90).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.threshold, 0.69);
        assert!(!check_inada(0.3, 0.65).unwrap().satisfied);
    }

    #[test]
    fn threshold_rejects_out_of_range() {
        assert!(check_inada(1.2, 0.9).is_err());
        assert!(check_inada(0.0, 0.9).is_err());
        assert!(check_inada(0.5, 0.0).is_err());
        assert!(check_inada(0.5, 1.1).is_err());
    }

    #[test]
    fn cobb_douglas_above_threshold_passes() {
        let grid = ProbeGrid::geometric(0.1, 1000.0, 10);
        let r = inada_condition_suite(&cobb_douglas(0.6), 0.85, &grid).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn cobb_douglas_below_alpha_fails_on_capital_axis() {
        let grid = ProbeGrid::geometric(0.1, 1000.0, 10);
        let r = inada_condition_suite(&cobb_douglas(0.6), 0.55, &grid).unwrap();
        assert!(r.positivity.both());
        assert!(r.constant_returns);
        assert!(!r.limits.capital && r.limits.labor, "{r:?}");
        assert!(!r.concavity.capital && r.concavity.labor, "{r:?}");
    }

    #[test]
    fn constant_production_has_no_marginal_product() {
        let grid = ProbeGrid::geometric(0.1, 1000.0, 8);
        let r = inada_condition_suite(&|_: f64, _: f64| 3.0, 0.9, &grid).unwrap();
        assert!(!r.positivity.capital && !r.positivity.labor);
        assert!(!r.all_pass());
    }

    #[test]
    fn small_grid_is_rejected() {
        let grid = ProbeGrid::geometric(0.1, 10.0, 7);
        assert!(matches!(
            inada_condition_suite(&cobb_douglas(0.5), 0.9, &grid),
            Err(KgcdError::ProbeGridTooSmall { found: 7, .. })
        ));
    }
}
