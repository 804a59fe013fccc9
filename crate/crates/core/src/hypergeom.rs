//! Gamma function, Pochhammer symbol and the Gauss hypergeometric function
//! ₂F₁(a, b; c; z) for real arguments.
//!
//! ₂F₁ is summed from its power series. Inside the unit disc the partial sums
//! are accumulated until a geometric tail bound drops below the tolerance; on
//! the unit circle (convergent only when a + b − c < 0) the partial sums
//! converge algebraically, so they are accelerated with the Levin u-transform.
//! Euler's integral representation, evaluated by adaptive quadrature, is kept
//! as an independent second route.

use std::f64::consts::PI;

use crate::error::{invalid, KgcdError, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

/// |z| above which the series is flagged as slowly convergent.
pub const SLOW_CONVERGENCE_RADIUS: f64 = 0.95;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) by the Lanczos approximation (g = 7), with the reflection formula
/// below 1/2. Fails at the poles x = 0, −1, −2, ….
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(invalid("x", "NaN argument"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(KgcdError::GammaPole { x });
    }
    if x == x.floor() && x <= 171.0 {
        // exact (n−1)! while every partial product is representable
        return Ok((2..x as u32).fold(1.0, |acc, i| acc * f64::from(i)));
    }
    if x < 0.5 {
        let g = gamma_fn(1.0 - x)?;
        return Ok(PI / ((PI * x).sin() * g));
    }
    let x = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    // w^{x+1/2} overflows near x = 143; split it around the exponential
    let half_power = w.powf(0.5 * (x + 0.5));
    Ok((2.0 * PI).sqrt() * half_power * ((-w).exp() * half_power) * series)
}

/// Rising factorial `x(x+1)…(x+n−1)`; 1 for n = 0.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x + f64::from(i)))
}

/// Where the series for given parameters converges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesConvergence {
    /// |z| < 1.
    Interior,
    /// |z| = 1 with a + b − c < 0.
    Boundary,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeomParams {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Result<Self> {
        if ![a, b, c, z].iter().all(|v| v.is_finite()) {
            return Err(invalid("hypergeom", "parameters must be finite"));
        }
        if c <= 0.0 && c == c.floor() {
            return Err(invalid("c", format!("c = {c} is zero or a negative integer")));
        }
        Ok(Self { a, b, c, z })
    }

    pub fn convergence(&self) -> SeriesConvergence {
        let r = self.z.abs();
        if self.terminates() || r < 1.0 {
            SeriesConvergence::Interior
        } else if r == 1.0 && self.a + self.b - self.c < 0.0 {
            SeriesConvergence::Boundary
        } else {
            SeriesConvergence::Divergent
        }
    }

    fn terminates(&self) -> bool {
        let nonpositive_int = |v: f64| v <= 0.0 && v == v.floor();
        nonpositive_int(self.a) || nonpositive_int(self.b)
    }

    /// Ratio `term_{n+1} / term_n`.
    #[inline]
    fn term_ratio(&self, n: f64) -> f64 {
        (self.a + n) * (self.b + n) * self.z / ((self.c + n) * (n + 1.0))
    }
}

/// Value of a summed series together with what is known about its accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Number of terms beyond the leading 1 that were added.
    pub terms: usize,
    /// Absolute error estimate: the tail bound for interior points, the
    /// spread of the last accepted Levin estimates on the unit circle.
    pub error_estimate: f64,
    /// |z| > 0.95: convergence is slow and `error_estimate` deserves a look.
    pub slow: bool,
    /// The term cap was reached before the tail bound met the tolerance.
    pub capped: bool,
}

/// ₂F₁(a, b; c; z) from its power series, using the term recurrence
/// `term_{n+1} = term_n·(a+n)(b+n)z / ((c+n)(n+1))`.
pub fn gauss_2f1_series(p: &HypergeomParams, tol: f64) -> Result<SeriesSum> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    match p.convergence() {
        SeriesConvergence::Divergent => Err(KgcdError::Divergent {
            excess: p.a + p.b - p.c,
            z_abs: p.z.abs(),
        }),
        SeriesConvergence::Boundary => Ok(levin_boundary_sum(p)),
        SeriesConvergence::Interior => Ok(direct_sum(p, tol)),
    }
}

fn direct_sum(p: &HypergeomParams, tol: f64) -> SeriesSum {
    let slow = p.z.abs() > SLOW_CONVERGENCE_RADIUS;
    // past this index the term ratios approach |z| monotonically
    let monotone_from = 2.0 * p.a.abs().max(p.b.abs()).max(p.c.abs()).max(1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut tail = f64::INFINITY;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        term *= p.term_ratio(nf);
        sum += term;
        if term == 0.0 {
            return SeriesSum {
                value: sum,
                terms: n + 1,
                error_estimate: 0.0,
                slow,
                capped: false,
            };
        }
        if nf + 1.0 >= monotone_from {
            let q = p.term_ratio(nf + 1.0).abs().max(p.z.abs());
            if q < 1.0 {
                tail = term.abs() * q / (1.0 - q);
                if tail < tol {
                    return SeriesSum {
                        value: sum,
                        terms: n + 1,
                        error_estimate: tail,
                        slow,
                        capped: false,
                    };
                }
            }
        }
    }
    SeriesSum {
        value: sum,
        terms: MAX_SERIES_TERMS,
        error_estimate: tail,
        slow,
        capped: true,
    }
}

const LEVIN_ORDER: usize = 30;

/// Levin u-transform of the partial sums, β = 1. The order with the smallest
/// change from its predecessor is returned.
fn levin_boundary_sum(p: &HypergeomParams) -> SeriesSum {
    let count = LEVIN_ORDER + 1;
    let mut terms = Vec::with_capacity(count);
    let mut partial = Vec::with_capacity(count);
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..count {
        if n > 0 {
            term *= p.term_ratio((n - 1) as f64);
        }
        sum += term;
        terms.push(term);
        partial.push(sum);
    }

    let beta = 1.0;
    let mut best = (f64::INFINITY, partial[count - 1]);
    let mut previous: Option<f64> = None;
    for k in 1..=LEVIN_ORDER {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut binom = 1.0;
        let last = beta + k as f64;
        for j in 0..=k {
            if j > 0 {
                binom *= (k - j + 1) as f64 / j as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let scale = ((beta + j as f64) / last).powi(k as i32 - 1);
            let remainder = (beta + j as f64) * terms[j];
            let w = sign * binom * scale / remainder;
            num += w * partial[j];
            den += w;
        }
        let estimate = num / den;
        if let Some(prev) = previous {
            let change = (estimate - prev).abs();
            if estimate.is_finite() && change < best.0 {
                best = (change, estimate);
            }
        }
        previous = Some(estimate);
    }
    SeriesSum {
        value: best.1,
        terms: count,
        error_estimate: best.0,
        slow: true,
        capped: false,
    }
}

/// ₂F₁ from Euler's integral
/// `Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt`,
/// valid for real `c > b > 0` and `z < 1`.
///
/// The interval is split at 1/2. Near 0 the substitution `t = x^{1/b}` (when
/// b < 1) and near 1 the substitution `1 − t = y^{1/(c−b)}` (when c − b < 1)
/// absorb the algebraic endpoint factors, leaving bounded integrands.
pub fn gauss_2f1_integral(p: &HypergeomParams, tol: f64) -> Result<f64> {
    let HypergeomParams { a, b, c, z } = *p;
    if !(c > b && b > 0.0) {
        return Err(invalid(
            "hypergeom",
            format!("Euler integral needs c > b > 0, got b = {b}, c = {c}"),
        ));
    }
    if !(z < 1.0) {
        return Err(invalid("z", format!("Euler integral needs z < 1, got {z}")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    let e = c - b;
    let prefactor = gamma_fn(c)? / (gamma_fn(b)? * gamma_fn(e)?);
    let opts = QuadOptions {
        abs_tol: 0.25 * tol / prefactor.abs(),
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    let kernel = |t: f64| (1.0 - z * t).powf(-a);

    let left = if b < 1.0 {
        let f = |x: f64| {
            let t = x.powf(1.0 / b);
            (1.0 - t).powf(e - 1.0) * kernel(t) / b
        };
        integrate(f, 0.0, 0.5f64.powf(b), &opts)?
    } else {
        let f = |t: f64| t.powf(b - 1.0) * (1.0 - t).powf(e - 1.0) * kernel(t);
        integrate(f, 0.0, 0.5, &opts)?
    };
    let right = if e < 1.0 {
        let f = |y: f64| {
            let t = 1.0 - y.powf(1.0 / e);
            t.powf(b - 1.0) * kernel(t) / e
        };
        integrate(f, 0.0, 0.5f64.powf(e), &opts)?
    } else {
        let f = |t: f64| t.powf(b - 1.0) * (1.0 - t).powf(e - 1.0) * kernel(t);
        integrate(f, 0.5, 1.0, &opts)?
    };
    Ok(prefactor * (left.value + right.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, c: f64, z: f64) -> HypergeomParams {
        HypergeomParams::new(a, b, c, z).unwrap()
    }

    #[test]
    fn gamma_at_integers_and_half() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        let sqrt_pi = PI.sqrt();
        assert!((gamma_fn(0.5).unwrap() - sqrt_pi).abs() < 1e-14);
    }

    #[test]
    fn gamma_half_against_its_defining_integral() {
        // Γ(1/2) = ∫₀^∞ t^{-1/2} e^{-t} dt = 2∫₀^∞ e^{-x²} dx with t = x²
        let q = integrate(|x: f64| 2.0 * (-x * x).exp(), 0.0, 40.0, &QuadOptions::default())
            .unwrap();
        assert!((gamma_fn(0.5).unwrap() - q.value).abs() < 1e-12);
    }

    #[test]
    fn gamma_matches_factorials_up_to_170() {
        let mut factorial = 1.0f64;
        for n in 1..=170u32 {
            // factorial holds (n-1)!
            let g = gamma_fn(f64::from(n)).unwrap();
            assert!(
                (g - factorial).abs() <= 1e-12 * factorial,
                "Γ({n}) = {g}, expected {factorial}"
            );
            factorial *= f64::from(n);
        }
    }

    #[test]
    fn gamma_reflection_and_poles() {
        // Γ(-1/2) = -2√π
        assert!((gamma_fn(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma_fn(x), Err(KgcdError::GammaPole { .. })));
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(12.345, 0), 1.0);
        assert_eq!(pochhammer(3.0, 4), 360.0);
        assert_eq!(pochhammer(-1.5, 2), 0.75);
    }

    #[test]
    fn pochhammer_matches_gamma_ratio() {
        for (x, n) in [(0.7, 5u32), (2.5, 10), (11.0, 3)] {
            let ratio = gamma_fn(x + f64::from(n)).unwrap() / gamma_fn(x).unwrap();
            assert!((pochhammer(x, n) - ratio).abs() < 1e-12 * ratio.abs());
        }
    }

    #[test]
    fn params_reject_nonpositive_integer_c() {
        assert!(HypergeomParams::new(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(HypergeomParams::new(1.0, 1.0, -3.0, 0.5).is_err());
        assert!(HypergeomParams::new(1.0, 1.0, -2.5, 0.5).is_ok());
    }

    #[test]
    fn convergence_classification() {
        assert_eq!(params(1.0, 1.0, 2.0, 0.5).convergence(), SeriesConvergence::Interior);
        assert_eq!(params(0.2, 0.3, 2.0, 1.0).convergence(), SeriesConvergence::Boundary);
        assert_eq!(params(1.0, 1.0, 2.0, 1.0).convergence(), SeriesConvergence::Divergent);
        assert_eq!(params(1.0, 1.0, 2.0, 1.5).convergence(), SeriesConvergence::Divergent);
        assert_eq!(params(-3.0, 1.0, 2.0, 4.0).convergence(), SeriesConvergence::Interior);
    }

    #[test]
    fn series_at_zero_is_one() {
        let s = gauss_2f1_series(&params(0.3, -1.7, 2.2, 0.0), 1e-15).unwrap();
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn series_log_identity() {
        // ₂F₁(1,1;2;z) = −ln(1−z)/z, so 2 ln 2 at z = 1/2
        let s = gauss_2f1_series(&params(1.0, 1.0, 2.0, 0.5), 1e-15).unwrap();
        assert!((s.value - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!(!s.slow && !s.capped);
    }

    #[test]
    fn terminating_series_is_exact() {
        // 1 + (−2)(3)(0.7)/1.5 + (−2)(−1)(3)(4)(0.49)/(1.5·2.5·2) = −0.232
        let s = gauss_2f1_series(&params(-2.0, 3.0, 1.5, 0.7), 1e-15).unwrap();
        assert!((s.value + 0.232).abs() < 1e-15);
        assert_eq!(s.error_estimate, 0.0);
    }

    #[test]
    fn series_refuses_divergent_arguments() {
        assert!(matches!(
            gauss_2f1_series(&params(1.0, 1.0, 2.0, 1.0), 1e-12),
            Err(KgcdError::Divergent { .. })
        ));
        assert!(gauss_2f1_series(&params(1.0, 1.0, 2.0, -1.2), 1e-12).is_err());
    }

    #[test]
    fn slow_flag_near_the_unit_circle() {
        let s = gauss_2f1_series(&params(-0.31, 0.42, 1.42, 0.999), 1e-14).unwrap();
        assert!(s.slow);
        assert!(!s.capped);
        let q = gauss_2f1_integral(&params(-0.31, 0.42, 1.42, 0.999), 1e-13).unwrap();
        assert!((s.value - q).abs() < 1e-10);
    }

    #[test]
    fn integral_normalisation_and_log_identity() {
        let v = gauss_2f1_integral(&params(0.8, 0.4, 1.7, 0.0), 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        let v = gauss_2f1_integral(&params(1.0, 1.0, 2.0, 0.5), 1e-12).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn integral_preconditions() {
        assert!(gauss_2f1_integral(&params(1.0, 2.0, 1.5, 0.5), 1e-10).is_err());
        assert!(gauss_2f1_integral(&params(1.0, -0.5, 1.5, 0.5), 1e-10).is_err());
        assert!(gauss_2f1_integral(&params(1.0, 0.5, 1.5, 1.0), 1e-10).is_err());
    }

    #[test]
    fn growth_model_parameters_agree_between_routes() {
        // a = α−1, b = (1−α)δ/γ, c = b+1 with α = 0.69, δ = 0.19, γ = 0.14
        let b = 0.31 * 0.19 / 0.14;
        let p = params(-0.31, b, b + 1.0, 0.26);
        let s = gauss_2f1_series(&p, 1e-15).unwrap().value;
        let q = gauss_2f1_integral(&p, 1e-12).unwrap();
        assert!((s - q).abs() < 1e-8);
        // mpmath hyp2f1 to 30 digits
        assert!((s - 0.974_724_304_674_959_3).abs() < 1e-14);
    }

    #[test]
    fn gauss_summation_on_the_unit_circle() {
        for (a, b) in [(0.5, 0.5), (0.5, 3.0), (-0.31, 0.42)] {
            let c = b + 1.0;
            let p = params(a, b, c, 1.0);
            let s = gauss_2f1_series(&p, 1e-12).unwrap();
            let exact = gamma_fn(c).unwrap() * gamma_fn(c - a - b).unwrap()
                / (gamma_fn(c - a).unwrap() * gamma_fn(c - b).unwrap());
            assert!((s.value - exact).abs() < 1e-8, "a={a} b={b}: {} vs {exact}", s.value);
        }
    }
}
