//! Command-line front end for the conformal Solow-Swan model.
//!
//! [`run`] parses arguments, dispatches to a subcommand and returns the
//! process exit code, writing reports to the supplied streams so the whole
//! surface can be exercised in-process.

pub mod csv;
pub mod scenario;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Args, Parser, Subcommand};
use kgcd_core::solow::{
    check_inada, escape_time, escape_time_bisection, feasibility, j_terms, k_migration,
    labor_unchecked, simulate, steady_state, Method, ModelParams, Regime, SimulationOutcome,
};
use kgcd_core::verification::{compare, ode_oracle, quadrature_j, ComparisonReport};
use kgcd_core::KgcdError;

use crate::csv::{fmt_g12, write_trajectory};
pub use crate::scenario::Scenario;

pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INADA_VIOLATED: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const TRUNCATED: i32 = 5;
    pub const VERIFY_FAILED: i32 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] KgcdError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Model(e) => match e {
                KgcdError::InvalidParameter { .. }
                | KgcdError::InvalidGrid(_)
                | KgcdError::ProbeGridTooSmall { .. } => exit::USAGE,
                KgcdError::Infeasible(_) | KgcdError::Inapplicable(_) | KgcdError::Horizon { .. } => {
                    exit::INFEASIBLE
                }
                _ => exit::INTERNAL,
            },
            CliError::Io(_) => exit::INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kgcd-solow", version, about = "Conformal Solow-Swan growth model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the conformal Inada threshold ρ > max(α, 1−α).
    #[command(allow_negative_numbers = true)]
    Inada {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        rho: f64,
    },
    /// Write one trajectory CSV per ρ in the scenario.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print k∞ and y∞ (no migration only).
    #[command(allow_negative_numbers = true)]
    SteadyState(ParamArgs),
    /// Print the escape time t_f for each ρ (strong negative migration only).
    #[command(allow_negative_numbers = true)]
    EscapeTime(ParamArgs),
    /// Compare closed forms against numerical oracles for every ρ.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Multiplies every closed-form capital value; for exercising failures.
        #[arg(long, hide = true, default_value_t = 1.0)]
        corrupt_scale: f64,
    },
}

/// Model parameters from a scenario file, flags, or both (flags win).
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long = "A")]
    pub technology: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "s")]
    pub savings: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "I")]
    pub migration: Option<f64>,
    #[arg(long = "L0")]
    pub l0: Option<f64>,
    #[arg(long)]
    pub k0: Option<f64>,
    /// May be repeated.
    #[arg(long)]
    pub rho: Vec<f64>,
}

impl ParamArgs {
    /// Resolves to a base parameter set and the list of orders. A defaults to 1
    /// and I to 0; `fill_initial` supplies L0 = k0 = 1 when they cannot matter.
    fn resolve(&self, fill_initial: bool) -> Result<(ModelParams, Vec<f64>), CliError> {
        let file = self.scenario.as_deref().map(Scenario::load).transpose()?;
        let pick = |flag: Option<f64>, from_file: Option<f64>, default: Option<f64>, key: &str| {
            flag.or(from_file)
                .or(default)
                .ok_or_else(|| CliError::Usage(format!("missing --{key}")))
        };
        let f = file.as_ref();
        let initial = fill_initial.then_some(1.0);
        let params = ModelParams {
            technology: pick(self.technology, f.map(|s| s.technology), Some(1.0), "A")?,
            alpha: pick(self.alpha, f.map(|s| s.alpha), None, "alpha")?,
            savings: pick(self.savings, f.map(|s| s.savings), None, "s")?,
            delta: pick(self.delta, f.map(|s| s.delta), None, "delta")?,
            gamma: pick(self.gamma, f.map(|s| s.gamma), None, "gamma")?,
            migration: pick(self.migration, f.map(|s| s.migration), Some(0.0), "I")?,
            l0: pick(self.l0, f.map(|s| s.l0), initial, "L0")?,
            k0: pick(self.k0, f.map(|s| s.k0), initial, "k0")?,
            rho: 1.0,
            m: Default::default(),
        };
        let rhos = if !self.rho.is_empty() {
            self.rho.clone()
        } else if let Some(s) = f {
            s.rho_values.clone()
        } else {
            vec![1.0]
        };
        for &rho in &rhos {
            params.with_rho(rho).validate()?;
        }
        Ok((params, rhos))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Inada { alpha, rho } => cmd_inada(*alpha, *rho, out),
        Command::Simulate { scenario, out: dir } => cmd_simulate(scenario, dir, out),
        Command::SteadyState(args) => cmd_steady_state(args, out),
        Command::EscapeTime(args) => cmd_escape_time(args, out),
        Command::Verify {
            scenario,
            tol,
            corrupt_scale,
        } => cmd_verify(scenario, *tol, *corrupt_scale, out),
    }
}

fn cmd_inada(alpha: f64, rho: f64, out: &mut dyn Write) -> Result<i32, CliError> {
    let v = check_inada(alpha, rho)?;
    let verdict = if v.satisfied { "satisfied" } else { "violated" };
    writeln!(
        out,
        "alpha = {}, rho = {}: {verdict} (threshold {})",
        fmt_g12(alpha),
        fmt_g12(rho),
        fmt_g12(v.threshold)
    )?;
    Ok(if v.satisfied { exit::OK } else { exit::INADA_VIOLATED })
}

fn cmd_steady_state(args: &ParamArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (p, _) = args.resolve(true)?;
    let ss = steady_state(&p)?;
    writeln!(out, "k_inf = {}", fmt_g12(ss.k_inf))?;
    writeln!(out, "y_inf = {}", fmt_g12(ss.y_inf))?;
    Ok(exit::OK)
}

fn cmd_escape_time(args: &ParamArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (base, rhos) = args.resolve(false)?;
    for rho in rhos {
        let p = base.with_rho(rho);
        let t_f = escape_time(&p)?;
        let root = escape_time_bisection(&p, 1e-12)?;
        writeln!(
            out,
            "rho = {}: t_f = {}  (bisection {}, |L(t_f)| = {})",
            fmt_g12(rho),
            fmt_g12(t_f),
            fmt_g12(root),
            fmt_g12(labor_unchecked(t_f, &p).abs())
        )?;
    }
    Ok(exit::OK)
}

/// `{stem}_rho{ρ}.csv` inside `dir`.
pub fn csv_path(dir: &Path, stem: &str, rho: f64) -> PathBuf {
    dir.join(format!("{stem}_rho{}.csv", fmt_g12(rho)))
}

fn output_stem(scenario: &Scenario, path: &Path) -> String {
    scenario.output_path.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trajectory".into())
    })
}

fn reject_infeasible(scenario: &Scenario) -> Result<(), CliError> {
    for &rho in &scenario.rho_values {
        if feasibility(&scenario.params(rho))?.regime == Regime::Infeasible {
            return Err(KgcdError::Infeasible(format!(
                "I = {} > 0 is outside the analysed regimes",
                scenario.migration
            ))
            .into());
        }
    }
    Ok(())
}

fn cmd_simulate(path: &Path, dir: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let scenario = Scenario::load(path)?;
    reject_infeasible(&scenario)?;
    std::fs::create_dir_all(dir)?;
    let stem = output_stem(&scenario, path);
    let grid = scenario.grid();

    let runs: Vec<Result<(SimulationOutcome, PathBuf), CliError>> = thread::scope(|scope| {
        let handles: Vec<_> = scenario
            .rho_values
            .iter()
            .map(|&rho| {
                let (grid, stem, scenario) = (&grid, &stem, &scenario);
                scope.spawn(move || {
                    let outcome = simulate(&scenario.params(rho), grid)?;
                    let file = csv_path(dir, stem, rho);
                    let mut w = BufWriter::new(File::create(&file)?);
                    write_trajectory(&mut w, &outcome.trajectory)?;
                    w.flush()?;
                    Ok((outcome, file))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });

    let mut code = exit::OK;
    for (&rho, run) in scenario.rho_values.iter().zip(runs) {
        let (outcome, file) = run?;
        let f = &outcome.feasibility;
        write!(out, "rho = {}: regime {}", fmt_g12(rho), f.regime)?;
        if let Some(t_f) = f.t_f {
            write!(out, ", t_f = {}", fmt_g12(t_f))?;
        }
        writeln!(out, ", {} rows -> {}", outcome.trajectory.len(), file.display())?;
        if !outcome.inada.satisfied {
            writeln!(
                out,
                "  warning: Inada conditions violated (rho must exceed {})",
                fmt_g12(outcome.inada.threshold)
            )?;
        }
        if let Some(note) = outcome.truncation {
            writeln!(
                out,
                "  truncated at t <= {} ({} grid points at or beyond the escape time dropped)",
                fmt_g12(note.cutoff),
                note.dropped
            )?;
            code = exit::TRUNCATED;
        }
    }
    Ok(code)
}

/// Fraction of t_f up to which verify compares in the strong regime.
pub const VERIFY_HORIZON: f64 = 0.95;

/// Comparisons for one order: capital against the ODE oracle, and in the
/// strong regime also the hypergeometric J against quadrature.
pub fn verify_order(
    p: &ModelParams,
    grid: &[f64],
    corrupt_scale: f64,
) -> Result<Vec<(&'static str, ComparisonReport)>, CliError> {
    let report = feasibility(p)?;
    let method = Method::for_regime(report.regime).ok_or_else(|| {
        KgcdError::Infeasible(format!("I = {} > 0 is outside the analysed regimes", p.migration))
    })?;
    let times: Vec<f64> = match report.t_f {
        Some(t_f) => grid.iter().copied().filter(|&t| t <= VERIFY_HORIZON * t_f).collect(),
        None => grid.to_vec(),
    };
    let oracle = ode_oracle(p, &times)?;
    let mut checks = vec![(
        "k",
        compare(
            |t| Ok(k_migration(t, p)? * corrupt_scale),
            &times,
            &oracle,
            (method, Method::OdeOracle),
        )?,
    )];
    if report.regime == Regime::StrongNegative {
        let quad = times
            .iter()
            .map(|&t| quadrature_j(t, p))
            .collect::<Result<Vec<_>, _>>()?;
        checks.push((
            "J",
            compare(
                |t| Ok(j_terms(t, p)?.j),
                &times,
                &quad,
                (Method::Hypergeometric, Method::Quadrature),
            )?,
        ));
    }
    Ok(checks)
}

fn cmd_verify(path: &Path, tol: f64, corrupt_scale: f64, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let scenario = Scenario::load(path)?;
    reject_infeasible(&scenario)?;
    let grid = scenario.grid();
    let results: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = scenario
            .rho_values
            .iter()
            .map(|&rho| {
                let (grid, scenario) = (&grid, &scenario);
                scope.spawn(move || verify_order(&scenario.params(rho), grid, corrupt_scale))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });

    writeln!(
        out,
        "{:<8} {:<6} {:<32} {:>14} {:>12} {:>8}  status",
        "rho", "check", "methods", "max_rel_error", "argmax_t", "samples"
    )?;
    let mut code = exit::OK;
    for (&rho, checks) in scenario.rho_values.iter().zip(results) {
        for (name, r) in checks? {
            let pass = r.max_rel_error <= tol;
            if !pass {
                code = exit::VERIFY_FAILED;
            }
            let methods = format!("{} vs {}", r.method_pair.0, r.method_pair.1);
            writeln!(
                out,
                "{:<8} {:<6} {:<32} {:>14.3e} {:>12} {:>8}  {}",
                fmt_g12(rho),
                name,
                methods,
                r.max_rel_error,
                fmt_g12(r.argmax_t),
                r.samples_compared,
                if pass { "ok" } else { "FAIL" }
            )?;
        }
    }
    writeln!(out, "tolerance {}", fmt_g12(tol))?;
    Ok(code)
}
