//! Generalized conformal derivative (order ρ, truncation m) and the Solow-Swan
//! growth model built on it.
//!
//! The crate is organised bottom-up:
//!
//! - [`conformal`]: the operator itself, time transform `u = t^ρ/ρ`, and a
//!   transformed-time RK4 integrator for conformal initial value problems.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration.
//! - [`hypergeom`]: Gamma, Pochhammer and Gauss ₂F₁ (series plus Euler integral).
//! - [`solow`]: labor dynamics, closed-form capital paths, feasibility and
//!   escape time, Inada checks, trajectory simulation.
//! - [`verification`]: independent oracles and comparison reports.

pub mod conformal;
pub mod error;
pub mod hypergeom;
pub mod quadrature;
pub mod solow;
pub mod verification;

pub use error::{KgcdError, Result};
