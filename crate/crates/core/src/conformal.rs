//! The generalized conformal derivative of order (ρ, m).
//!
//! For `t > 0` the operator is the limit of the difference quotient
//!
//! ```text
//! D^ρ_m f(t) = lim_{ε→0} [f(t·e_m(ε t^{-ρ})) − f(t)] / ε
//! ```
//!
//! where `e_m` is the exponential series truncated after `m` terms. For a
//! differentiable `f` this equals `t^{1-ρ} f'(t)` regardless of `m`, which is
//! what makes the transformed time `u = t^ρ/ρ` useful: `D^ρ x = g(t, x)` is the
//! ordinary equation `dx/du = g(t(u), x)`.

use crate::error::{invalid, KgcdError, Result};

/// Truncation index of the exponential series inside the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truncation {
    Finite(u32),
    Infinite,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Finite(1)
    }
}

impl std::fmt::Display for Truncation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Truncation::Finite(m) => write!(f, "{m}"),
            Truncation::Infinite => f.write_str("infinite"),
        }
    }
}

/// Order `(ρ, m)` of the operator, `0 < ρ ≤ 1`, `m ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalOrder {
    rho: f64,
    m: Truncation,
}

impl ConformalOrder {
    pub fn new(rho: f64, m: Truncation) -> Result<Self> {
        validate_rho(rho)?;
        if m == Truncation::Finite(0) {
            return Err(invalid("m", "truncation index must be at least 1"));
        }
        Ok(Self { rho, m })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn truncation(&self) -> Truncation {
        self.m
    }
}

pub(crate) fn validate_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(invalid("rho", format!("must lie in (0, 1], got {rho}")))
    }
}

/// Partial sum `Σ_{i=0}^{m} t^i / i!`, or `exp(t)` for an infinite index.
pub fn truncated_exp(t: f64, m: Truncation) -> Result<f64> {
    let value = match m {
        Truncation::Infinite => t.exp(),
        Truncation::Finite(m) => {
            let mut term = 1.0;
            let mut sum = 1.0;
            for i in 1..=m {
                term *= t / f64::from(i);
                sum += term;
            }
            sum
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(KgcdError::Overflow { t })
    }
}

/// A real function of positive time, either evaluable or sampled.
pub trait ScalarPath {
    fn value_at(&self, t: f64) -> f64;
}

impl<F> ScalarPath for F
where
    F: Fn(f64) -> f64 + ?Sized,
{
    fn value_at(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Sampled path `(tᵢ, fᵢ)` evaluated by piecewise cubic Hermite interpolation
/// with three-point slope estimates. Returns NaN outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(KgcdError::InvalidGrid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(KgcdError::InvalidGrid(
                "a sampled path needs at least two samples".into(),
            ));
        }
        if times[0] <= 0.0 {
            return Err(KgcdError::InvalidGrid(
                "sampled path times must be positive".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(KgcdError::InvalidGrid(
                "sampled path times must be strictly increasing".into(),
            ));
        }
        let slopes = hermite_slopes(&times, &values);
        Ok(Self {
            times,
            values,
            slopes,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn hermite_slopes(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n == 2 {
        let s = (f[1] - f[0]) / (t[1] - t[0]);
        return vec![s, s];
    }
    let mut slopes = Vec::with_capacity(n);
    for i in 0..n {
        // three-point derivative of the interpolating parabola through the
        // neighbouring samples (one-sided at the ends)
        let (j0, j1, j2) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        let x = t[i];
        let (x0, x1, x2) = (t[j0], t[j1], t[j2]);
        let d0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let d1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let d2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        slopes.push(d0 * f[j0] + d1 * f[j1] + d2 * f[j2]);
    }
    slopes
}

impl ScalarPath for SampledPath {
    fn value_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if !(t >= self.times[0] && t <= self.times[n - 1]) {
            return f64::NAN;
        }
        let j = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.times[j + 1] - self.times[j];
        let s = (t - self.times[j]) / h;
        hermite(
            s,
            h,
            self.values[j],
            self.slopes[j],
            self.values[j + 1],
            self.slopes[j + 1],
        )
    }
}

/// Cubic Hermite interpolant on a unit-normalised interval of width `h`.
#[inline]
pub(crate) fn hermite(s: f64, h: f64, x0: f64, d0: f64, x1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1
}

/// ε schedule for [`kgcd_limit`]. Values are multipliers of `t^ρ`, so the
/// relative displacement of the argument is the same at every `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSchedule {
    pub multipliers: Vec<f64>,
    /// Allowed spread between the last two Richardson estimates, relative to
    /// `max(1, |estimate|)`.
    pub tolerance: f64,
}

impl EpsSchedule {
    /// Geometric schedule from `start` down to `end` (both relative to `t^ρ`).
    pub fn geometric(start: f64, end: f64, count: usize) -> Result<Self> {
        if !(start > end && end > 0.0) || count < 3 {
            return Err(invalid(
                "eps_schedule",
                "need start > end > 0 and at least three values",
            ));
        }
        let ratio = (end / start).powf(1.0 / (count - 1) as f64);
        let multipliers = (0..count).map(|i| start * ratio.powi(i as i32)).collect();
        Ok(Self {
            multipliers,
            tolerance: 1e-6,
        })
    }
}

impl Default for EpsSchedule {
    /// `1e-2·t^ρ` down to `1e-7·t^ρ` in decades.
    fn default() -> Self {
        Self {
            multipliers: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7],
            tolerance: 1e-6,
        }
    }
}

/// Evaluates the operator from its limit definition.
///
/// Each ε gives the quotient `[f(t·e_m(ε t^{-ρ})) − f(t)] / ε`, whose bias is
/// first order in ε. Consecutive quotients are combined by two-point Richardson
/// extrapolation and the estimate from the two smallest ε is returned. If it
/// differs from the previous estimate by more than the schedule tolerance the
/// call fails with [`KgcdError::NonConvergence`].
pub fn kgcd_limit<P: ScalarPath + ?Sized>(
    f: &P,
    t: f64,
    order: ConformalOrder,
    schedule: &EpsSchedule,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("t", format!("limit definition needs t > 0, got {t}")));
    }
    let eps_list = &schedule.multipliers;
    if eps_list.len() < 3 || eps_list.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(invalid(
            "eps_schedule",
            "need at least three strictly decreasing positive values",
        ));
    }
    let scale = t.powf(order.rho);
    let f_t = f.value_at(t);

    let mut quotients = Vec::with_capacity(eps_list.len());
    for &c in eps_list {
        let eps = c * scale;
        let arg = t * truncated_exp(c, order.m)?;
        quotients.push((eps, (f.value_at(arg) - f_t) / eps));
    }

    let richardson: Vec<f64> = quotients
        .windows(2)
        .map(|w| {
            let (e1, q1) = w[0];
            let (e2, q2) = w[1];
            (e1 * q2 - e2 * q1) / (e1 - e2)
        })
        .collect();
    let n = richardson.len();
    let estimate = richardson[n - 1];
    let spread = (estimate - richardson[n - 2]).abs();
    if !estimate.is_finite() {
        return Err(KgcdError::NotFinite { t });
    }
    if spread > schedule.tolerance * estimate.abs().max(1.0) {
        return Err(KgcdError::NonConvergence { estimate, spread });
    }
    Ok(estimate)
}

/// `t^{1-ρ}·df`, the operator applied to a differentiable function with
/// ordinary derivative `df` at `t`. At `t = 0` this is the right limit: zero
/// for ρ < 1 and `df` for ρ = 1.
pub fn kgcd_formula(df: f64, t: f64, rho: f64) -> f64 {
    t.powf(1.0 - rho) * df
}

/// Transformed time `u = t^ρ/ρ`.
#[inline]
pub fn transform_time(t: f64, rho: f64) -> f64 {
    t.powf(rho) / rho
}

/// Inverse of [`transform_time`]: `t = (ρu)^{1/ρ}`.
#[inline]
pub fn inverse_transform_time(u: f64, rho: f64) -> f64 {
    (rho * u).powf(1.0 / rho)
}

/// Step control for the transformed-time integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct IvpOptions {
    pub initial_steps: usize,
    /// Successive refinements must agree to this relative tolerance at every
    /// grid point.
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            initial_steps: 1024,
            rel_tol: 1e-9,
            max_steps: 1 << 23,
        }
    }
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(KgcdError::InvalidGrid("empty time grid".into()));
    }
    if !(t_grid[0] >= 0.0) {
        return Err(KgcdError::InvalidGrid(format!(
            "grid must start at t >= 0, got {}",
            t_grid[0]
        )));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KgcdError::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Integrates `D^ρ x = rhs(t, x)` for a state of dimension `N` with exactly
/// `steps` classical RK4 steps of equal length in `u = t^ρ/ρ`, then
/// interpolates the nodes back onto `t_grid` with cubic Hermite segments.
/// The first grid point is the initial time.
pub fn integrate_conformal_fixed<const N: usize, F>(
    rhs: &F,
    x0: [f64; N],
    rho: f64,
    t_grid: &[f64],
    steps: usize,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    validate_rho(rho)?;
    validate_grid(t_grid)?;
    if steps == 0 {
        return Err(invalid("steps", "need at least one step"));
    }

    let u0 = transform_time(t_grid[0], rho);
    let u_end = transform_time(t_grid[t_grid.len() - 1], rho);
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(x0);
    if t_grid.len() == 1 {
        return Ok(out);
    }

    let h = (u_end - u0) / steps as f64;
    if !(h > 0.0) || u0 + h == u0 {
        return Err(KgcdError::StepUnderflow {
            steps,
            disagreement: f64::NAN,
        });
    }
    let time = |u: f64| inverse_transform_time(u, rho);
    let axpy = |x: &[f64; N], k: &[f64; N], a: f64| {
        let mut y = *x;
        for i in 0..N {
            y[i] += a * k[i];
        }
        y
    };

    let mut x = x0;
    let mut dx = rhs(time(u0), &x);
    let mut next_grid = 1;
    for j in 0..steps {
        let u = u0 + j as f64 * h;
        let k1 = dx;
        let k2 = rhs(time(u + 0.5 * h), &axpy(&x, &k1, 0.5 * h));
        let k3 = rhs(time(u + 0.5 * h), &axpy(&x, &k2, 0.5 * h));
        let k4 = rhs(time(u + h), &axpy(&x, &k3, h));
        let mut x_new = x;
        for i in 0..N {
            x_new[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let u_new = if j + 1 == steps { u_end } else { u + h };
        let t_new = time(u_new);
        if x_new.iter().any(|v| !v.is_finite()) {
            return Err(KgcdError::NotFinite { t: t_new });
        }
        let dx_new = rhs(t_new, &x_new);

        while next_grid < t_grid.len() {
            let ug = transform_time(t_grid[next_grid], rho);
            if ug > u_new && j + 1 < steps {
                break;
            }
            let s = ((ug - u) / h).clamp(0.0, 1.0);
            let mut xi = [0.0; N];
            for i in 0..N {
                xi[i] = hermite(s, h, x[i], dx[i], x_new[i], dx_new[i]);
            }
            out.push(xi);
            next_grid += 1;
        }
        x = x_new;
        dx = dx_new;
    }
    Ok(out)
}

/// [`integrate_conformal_fixed`] with step doubling until two successive
/// refinements agree to `opts.rel_tol` at every grid point.
pub fn integrate_conformal_system<const N: usize, F>(
    rhs: &F,
    x0: [f64; N],
    rho: f64,
    t_grid: &[f64],
    opts: &IvpOptions,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut steps = opts.initial_steps.max(1);
    let mut previous = integrate_conformal_fixed(rhs, x0, rho, t_grid, steps)?;
    let mut disagreement = f64::INFINITY;
    while steps < opts.max_steps {
        steps *= 2;
        let current = integrate_conformal_fixed(rhs, x0, rho, t_grid, steps)?;
        disagreement = current
            .iter()
            .zip(&previous)
            .flat_map(|(c, p)| c.iter().zip(p.iter()))
            .map(|(c, p)| (c - p).abs() / c.abs().max(1e-30))
            .fold(0.0, f64::max);
        if disagreement <= opts.rel_tol {
            return Ok(current);
        }
        previous = current;
    }
    Err(KgcdError::StepUnderflow {
        steps,
        disagreement,
    })
}

/// Scalar conformal initial value problem `D^ρ x = rhs(t, x)`, `x(t₀) = x0`,
/// sampled on `t_grid` (whose first point is `t₀ ≥ 0`).
pub fn integrate_conformal_ivp<F>(
    rhs: F,
    x0: f64,
    rho: f64,
    t_grid: &[f64],
    opts: &IvpOptions,
) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> f64,
{
    let system = |t: f64, x: &[f64; 1]| [rhs(t, x[0])];
    integrate_conformal_system(&system, [x0], rho, t_grid, opts)
        .map(|path| path.into_iter().map(|x| x[0]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(rho: f64, m: Truncation) -> ConformalOrder {
        ConformalOrder::new(rho, m).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn truncated_exp_examples() {
        assert_eq!(truncated_exp(0.0, Truncation::Finite(3)).unwrap(), 1.0);
        assert_eq!(truncated_exp(1.0, Truncation::Finite(2)).unwrap(), 2.5);
        assert!(close(
            truncated_exp(1.0, Truncation::Infinite).unwrap(),
            std::f64::consts::E,
            1e-15
        ));
    }

    #[test]
    fn truncated_exp_overflow() {
        assert!(matches!(
            truncated_exp(1000.0, Truncation::Infinite),
            Err(KgcdError::Overflow { .. })
        ));
        assert!(truncated_exp(1e200, Truncation::Finite(3)).is_err());
    }

    #[test]
    fn order_validation() {
        assert!(ConformalOrder::new(0.0, Truncation::Finite(1)).is_err());
        assert!(ConformalOrder::new(1.2, Truncation::Finite(1)).is_err());
        assert!(ConformalOrder::new(0.5, Truncation::Finite(0)).is_err());
        assert!(ConformalOrder::new(1.0, Truncation::Infinite).is_ok());
    }

    #[test]
    fn limit_of_constant_is_zero() {
        let d = kgcd_limit(
            &|_t: f64| 7.0,
            2.0,
            order(0.7, Truncation::Finite(1)),
            &EpsSchedule::default(),
        )
        .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn limit_of_square_matches_power_rule() {
        // 2·4^{1.5} = 16
        for m in [Truncation::Finite(1), Truncation::Finite(3)] {
            let d = kgcd_limit(&|t: f64| t * t, 4.0, order(0.5, m), &EpsSchedule::default())
                .unwrap();
            assert!(close(d, 16.0, 1e-8), "m={m}: {d}");
        }
    }

    #[test]
    fn limit_requires_positive_t() {
        let r = kgcd_limit(
            &|t: f64| t,
            0.0,
            order(0.5, Truncation::Finite(1)),
            &EpsSchedule::default(),
        );
        assert!(matches!(r, Err(KgcdError::InvalidParameter { .. })));
    }

    #[test]
    fn limit_flags_non_convergence() {
        // every displaced argument lands past the jump, so quotients grow as 1/ε
        let step = |t: f64| if t > 3.0 { 1.0 } else { 0.0 };
        let r = kgcd_limit(
            &step,
            3.0 - 1e-9,
            order(1.0, Truncation::Finite(1)),
            &EpsSchedule::default(),
        );
        assert!(matches!(r, Err(KgcdError::NonConvergence { .. })));
    }

    #[test]
    fn formula_examples() {
        assert_eq!(kgcd_formula(1.0, 5.0, 1.0), 1.0);
        assert!(close(kgcd_formula(8.0, 4.0, 0.5), 16.0, 1e-15));
        assert_eq!(kgcd_formula(0.0, 3.0, 0.8), 0.0);
        // right limits at the origin
        assert_eq!(kgcd_formula(2.0, 0.0, 1.0), 2.0);
        assert_eq!(kgcd_formula(2.0, 0.0, 0.6), 0.0);
    }

    #[test]
    fn time_transform_examples() {
        assert_eq!(transform_time(0.0, 0.7), 0.0);
        assert_eq!(transform_time(2.0, 1.0), 2.0);
        for rho in [0.6, 0.85] {
            for t in [0.1, 1.0, 10.0] {
                let back = inverse_transform_time(transform_time(t, rho), rho);
                assert!((back - t).abs() <= 1e-12 * t, "rho={rho} t={t}");
            }
        }
    }

    #[test]
    fn sampled_path_reproduces_cubic() {
        let times: Vec<f64> = (1..=40).map(|i| 0.25 * i as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| t * t).collect();
        let path = SampledPath::new(times, values).unwrap();
        // three-point slopes are exact for quadratics, so Hermite is too
        assert!(close(path.value_at(3.3), 3.3 * 3.3, 1e-12));
        assert!(path.value_at(0.1).is_nan());
        let d = kgcd_limit(
            &path,
            4.0,
            order(0.5, Truncation::Finite(1)),
            &EpsSchedule::default(),
        )
        .unwrap();
        assert!(close(d, 16.0, 1e-6), "{d}");
    }

    #[test]
    fn sampled_path_rejects_bad_grids() {
        assert!(SampledPath::new(vec![1.0], vec![1.0]).is_err());
        assert!(SampledPath::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(SampledPath::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(SampledPath::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }

    #[test]
    fn ivp_constant_path() {
        let grid = [0.0, 1.0, 2.5, 7.0];
        let x = integrate_conformal_ivp(|_, _| 0.0, 3.5, 0.8, &grid, &IvpOptions::default())
            .unwrap();
        assert!(x.iter().all(|&v| v == 3.5));
    }

    #[test]
    fn ivp_exponential_growth() {
        // 100·e^{0.2}
        let grid: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
        let x = integrate_conformal_ivp(|_, x| 0.02 * x, 100.0, 1.0, &grid, &IvpOptions::default())
            .unwrap();
        let expected = 122.140_275_816_016_98;
        assert!((x[20] - expected).abs() / expected < 1e-9, "{}", x[20]);
    }

    #[test]
    fn ivp_fractional_growth_matches_closed_form() {
        // 100·e^{0.02·10^{0.9}/0.9}, mpmath to 30 digits
        let expected = 119.305_516_843_310_73;
        let grid = [0.0, 2.0, 10.0];
        let x = integrate_conformal_ivp(|_, x| 0.02 * x, 100.0, 0.9, &grid, &IvpOptions::default())
            .unwrap();
        assert!((x[2] - expected).abs() / expected < 1e-9, "{}", x[2]);
    }

    #[test]
    fn ivp_single_point_grid() {
        let x = integrate_conformal_ivp(|_, x| x, 2.0, 0.5, &[0.0], &IvpOptions::default())
            .unwrap();
        assert_eq!(x, vec![2.0]);
    }

    #[test]
    fn ivp_rejects_bad_grid() {
        let opts = IvpOptions::default();
        assert!(integrate_conformal_ivp(|_, x| x, 1.0, 0.5, &[], &opts).is_err());
        assert!(integrate_conformal_ivp(|_, x| x, 1.0, 0.5, &[-1.0, 1.0], &opts).is_err());
        assert!(integrate_conformal_ivp(|_, x| x, 1.0, 0.5, &[0.0, 2.0, 1.0], &opts).is_err());
        assert!(integrate_conformal_ivp(|_, x| x, 1.0, 1.5, &[0.0, 1.0], &opts).is_err());
    }

    #[test]
    fn ivp_detects_nan() {
        let r = integrate_conformal_ivp(
            |_, x: f64| (x - 2.0).sqrt(),
            1.0,
            1.0,
            &[0.0, 1.0],
            &IvpOptions::default(),
        );
        assert!(matches!(r, Err(KgcdError::NotFinite { .. })));
    }

    #[test]
    fn ivp_reports_exhausted_refinement() {
        let opts = IvpOptions {
            initial_steps: 4,
            rel_tol: 1e-15,
            max_steps: 16,
        };
        let r = integrate_conformal_ivp(|_, x| x, 1.0, 1.0, &[0.0, 3.0], &opts);
        assert!(matches!(r, Err(KgcdError::StepUnderflow { .. })));
    }
}
