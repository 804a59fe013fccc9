use super::capital::{k_migration, y_from_k};
use super::feasibility::{feasibility, FeasibilityReport, Regime};
use super::inada::{check_inada, InadaVerdict};
use super::labor::{labor, labor_growth_rate};
use super::ModelParams;
use crate::error::{KgcdError, Result};

/// How a sample's capital value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Hypergeometric,
    Quadrature,
    OdeOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Hypergeometric => "hypergeometric",
            Method::Quadrature => "quadrature",
            Method::OdeOracle => "ode_oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "closed_form" => Some(Method::ClosedForm),
            "hypergeometric" => Some(Method::Hypergeometric),
            "quadrature" => Some(Method::Quadrature),
            "ode_oracle" => Some(Method::OdeOracle),
            _ => None,
        }
    }

    /// Method used by the closed-form dispatch in a given regime.
    pub fn for_regime(regime: Regime) -> Option<Self> {
        match regime {
            Regime::NoMigration => Some(Method::ClosedForm),
            Regime::StrongNegative => Some(Method::Hypergeometric),
            Regime::MildNegative => Some(Method::Quadrature),
            Regime::Infeasible => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub k: f64,
    pub y: f64,
    pub labor: f64,
    /// Labor growth rate n(t).
    pub n: f64,
    pub method: Method,
}

/// Time series of the model state. Times strictly increase; labor and
/// capital are positive at every sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(KgcdError::InvalidGrid(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        if let Some(s) = samples.iter().find(|s| !(s.labor > 0.0 && s.k > 0.0)) {
            return Err(KgcdError::Breakdown { t: s.t, z: s.k });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn capital(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.k)
    }
}

/// Grid points refused near the escape time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationNote {
    pub t_f: f64,
    /// Largest admissible sample time, `(1 − 1e−6)·t_f`.
    pub cutoff: f64,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    pub trajectory: Trajectory,
    pub feasibility: FeasibilityReport,
    /// Violation is reported, not enforced.
    pub inada: InadaVerdict,
    pub truncation: Option<TruncationNote>,
}

/// Relative margin kept below the escape time.
pub const ESCAPE_MARGIN: f64 = 1e-6;

/// Evaluates the regime-appropriate closed forms on `t_grid`.
///
/// In the strong negative migration regime grid points past
/// `(1 − 1e−6)·t_f` are dropped and reported in
/// [`SimulationOutcome::truncation`].
pub fn simulate(p: &ModelParams, t_grid: &[f64]) -> Result<SimulationOutcome> {
    let report = feasibility(p)?;
    let method = Method::for_regime(report.regime).ok_or_else(|| {
        KgcdError::Infeasible(format!(
            "I = {} with γ = {} is outside the analysed regimes",
            p.migration, p.gamma
        ))
    })?;
    let inada = check_inada(p.alpha, p.rho)?;
    if t_grid.is_empty() {
        return Err(KgcdError::InvalidGrid("empty time grid".into()));
    }
    if !(t_grid[0] >= 0.0) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KgcdError::InvalidGrid(
            "grid must start at t >= 0 and increase strictly".into(),
        ));
    }

    let (admissible, truncation) = match report.t_f {
        Some(t_f) => {
            let cutoff = (1.0 - ESCAPE_MARGIN) * t_f;
            let kept = t_grid.partition_point(|&t| t <= cutoff);
            if kept == 0 {
                return Err(KgcdError::Horizon { t: t_grid[0], t_f });
            }
            let note = (kept < t_grid.len()).then_some(TruncationNote {
                t_f,
                cutoff,
                dropped: t_grid.len() - kept,
            });
            (&t_grid[..kept], note)
        }
        None => (t_grid, None),
    };

    let samples = admissible
        .iter()
        .map(|&t| {
            let k = k_migration(t, p)?;
            Ok(Sample {
                t,
                k,
                y: y_from_k(k, p)?,
                labor: labor(t, p)?,
                n: labor_growth_rate(t, p)?,
                method,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimulationOutcome {
        trajectory: Trajectory::new(samples)?,
        feasibility: report,
        inada,
        truncation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solow::{escape_time, presets, steady_state};

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn single_point_grid() {
        let p = presets::no_migration(0.9);
        let out = simulate(&p, &[0.0]).unwrap();
        let s = out.trajectory.samples()[0];
        assert_eq!(s.k, p.k0);
        assert_eq!(s.y, p.technology * p.k0.powf(p.alpha));
        assert_eq!(s.labor, p.l0);
        assert_eq!(s.method, Method::ClosedForm);
    }

    #[test]
    fn no_migration_paths_decrease_toward_steady_state() {
        let k_inf = steady_state(&presets::no_migration(1.0)).unwrap().k_inf;
        for rho in [1.0, 0.95, 0.9, 0.85] {
            let out = simulate(&presets::no_migration(rho), &grid(300.0, 301)).unwrap();
            assert!(out.inada.satisfied);
            assert!(out.truncation.is_none());
            let k: Vec<f64> = out.trajectory.capital().collect();
            assert!(k.windows(2).all(|w| w[1] < w[0]), "rho={rho}");
            assert!(k.iter().all(|&v| v > k_inf));
        }
    }

    #[test]
    fn strong_migration_descends_then_ascends_and_is_truncated() {
        for rho in [1.0, 0.98, 0.95, 0.9] {
            let p = presets::negative_migration(rho);
            let t_f = escape_time(&p).unwrap();
            let out = simulate(&p, &grid(12.0, 1201)).unwrap();
            let note = out.truncation.expect("grid runs past t_f");
            assert_eq!(note.t_f, t_f);
            let k: Vec<f64> = out.trajectory.capital().collect();
            let (argmin, _) = k
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            assert!(argmin > 0 && argmin < k.len() - 1, "rho={rho}");
            assert!(k[..=argmin].windows(2).all(|w| w[1] < w[0]));
            assert!(k[argmin..].windows(2).all(|w| w[1] > w[0]));
            assert!(out.trajectory.samples().iter().all(|s| s.method == Method::Hypergeometric));
            assert!(*k.last().unwrap() > 10.0 * p.k0);
        }
    }

    #[test]
    fn inada_violation_is_only_a_warning() {
        let p = presets::no_migration(0.55);
        let out = simulate(&p, &grid(10.0, 11)).unwrap();
        assert!(!out.inada.satisfied);
        assert_eq!(out.trajectory.len(), 11);
    }

    #[test]
    fn mild_migration_uses_quadrature() {
        let p = presets::no_migration(0.9).with_migration(-1.0);
        let out = simulate(&p, &grid(20.0, 5)).unwrap();
        assert!(out.trajectory.samples().iter().all(|s| s.method == Method::Quadrature));
    }

    #[test]
    fn rejects_infeasible_and_bad_grids() {
        let p = presets::no_migration(1.0);
        assert!(matches!(
            simulate(&p.with_migration(1.0), &[0.0, 1.0]),
            Err(KgcdError::Infeasible(_))
        ));
        assert!(simulate(&p, &[]).is_err());
        assert!(simulate(&p, &[1.0, 0.5]).is_err());
        let strong = presets::negative_migration(1.0);
        assert!(matches!(simulate(&strong, &[20.0]), Err(KgcdError::Horizon { .. })));
    }

    #[test]
    fn method_tags_round_trip() {
        for m in [Method::ClosedForm, Method::Hypergeometric, Method::Quadrature, Method::OdeOracle] {
            assert_eq!(Method::parse(m.as_str()), Some(m));
        }
        assert_eq!(Method::parse("guess"), None);
    }
}
