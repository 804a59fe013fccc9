use thiserror::Error;

pub type Result<T> = std::result::Result<T, KgcdError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KgcdError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("truncated exponential overflowed at t = {t}")]
    Overflow { t: f64 },

    #[error("difference quotient did not settle: estimate {estimate}, spread {spread:e}")]
    NonConvergence { estimate: f64, spread: f64 },

    #[error("integrator step refinement exhausted at {steps} steps (last disagreement {disagreement:e})")]
    StepUnderflow { steps: usize, disagreement: f64 },

    #[error("non-finite value encountered at t = {t}")]
    NotFinite { t: f64 },

    #[error("Gamma function has a pole at x = {x}")]
    GammaPole { x: f64 },

    #[error("hypergeometric series diverges (a+b-c = {excess}, |z| = {z_abs})")]
    Divergent { excess: f64, z_abs: f64 },

    #[error("hypergeometric series did not converge: {terms} terms, tail estimate {tail:e}")]
    SeriesNonConvergence { terms: usize, tail: f64 },

    #[error("quadrature did not converge: value {value}, error estimate {error:e}")]
    QuadratureNonConvergence { value: f64, error: f64 },

    #[error("t = {t} is outside the feasible horizon [0, {t_f})")]
    Horizon { t: f64, t_f: f64 },

    #[error("scenario is infeasible: {0}")]
    Infeasible(String),

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("closed form broke down at t = {t} (Z = {z})")]
    Breakdown { t: f64, z: f64 },

    #[error("probe grid has {found} points on an axis; at least {required} are needed")]
    ProbeGridTooSmall { found: usize, required: usize },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> KgcdError {
    KgcdError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
