//! Command-line front end for the `deadcore` toolkit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use deadcore::model::validate_admissible;

pub mod config;
pub mod report;
mod verbs;

pub use config::{load_config, RunOptions};
pub use report::{emit_report, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;
pub const EXIT_UNWRITABLE: i32 = 73;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Inadmissible(String),
    Runtime(String),
    Unwritable(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Inadmissible(_) => EXIT_INADMISSIBLE,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::Unwritable(_) => EXIT_UNWRITABLE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Inadmissible(m) => write!(f, "inadmissible spec: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
            CliError::Unwritable(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<deadcore::error::Error> for CliError {
    fn from(e: deadcore::error::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Model spec: a flat JSON object with beta, m, q, gamma, alpha, lambda,
    /// c, d, hamiltonian, nonlinearity and optional run keys.
    #[arg(long = "spec", value_name = "PATH")]
    pub spec: PathBuf,
    /// Output directory, created if missing.
    #[arg(long = "out", value_name = "DIR")]
    pub out: PathBuf,
    /// Override one key, e.g. `--set gamma=0.5` or `--set mode=jacobi`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "deadcore",
    version,
    about = "Dead cores, radial barriers and Liouville thresholds for Δ∞^β u = cH(u,∇u) + λf(x,u)",
    after_help = "Set DEADCORE_THREADS to cap the worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: VerbArgs,
}

#[derive(Debug, Subcommand)]
pub enum VerbArgs {
    /// Check the structural assumptions of the model row.
    ///
    /// Anchors: "0<m<3−β, m+q+β<3, 0≤γ<3−β, −1−γ<α" for |x|^α(u⁺)^γ;
    /// "0≤α<(4−β−m)(3−β−γ)/(2(3−β−m))" for (1+|x|²)^(−α)u^γ;
    /// "0<m≤2−β, 0≤γ, −1<α≤0" for |u|^γ e^u. Always exits 0 once the
    /// spec parses; the verdict is in report.json.
    Admit(CommonArgs),
    /// Balanced exponents and the selected profile h(s) = τ s^p.
    ///
    /// Anchors: "p₂ = (4−β+α)/(3−β−γ)", "τ₂^(3−β−γ) p₂^(3−β)(p₂−1) = λ",
    /// "p = min{p₁, p₂}", "T = (d/τ)^(1/p)".
    Balance(CommonArgs),
    /// Radial barrier u(x) = h(|x|−ρ) and its pointwise ODE residual.
    ///
    /// Anchors: "(h′)^(2−β) h″ = cH(h, h′) + λ f(s, h)", "h(s) = τ s^p",
    /// plateau "ρ = R − T".
    Barrier(CommonArgs),
    /// Shoot h(0) = h′(0) = 0, h(T) = d and measure the dead core.
    ///
    /// Anchors: "h(0) = h′(0) = 0", "T = (d/τ)^(1/p)"; for the LEM weight
    /// "τ T^p (1+T²)^(−α/(3−β−γ)) = d" with the weight frozen at T.
    Radial(CommonArgs),
    /// Monotone grid scheme on a disc with boundary datum d.
    ///
    /// Anchors: "Δ∞^β u = |∇u|^(2−β) Δ∞ u", comparison "u ≤ v on ∂Ω implies
    /// u ≤ v in Ω", sandwich "0 ≤ u ≤ barrier". Keys: epsilon, nodes,
    /// stencil_dirs, max_iters, damping, tolerance, mode=gauss_seidel|jacobi.
    Grid(CommonArgs),
    /// Growth threshold and classification of growth samples.
    ///
    /// Anchors: "limsup sup_{B_R} u / R^p < θ implies u ≡ 0", witness
    /// "u = θ|x|^p", plateau fraction "1 − Φ^(1/p)".
    Liouville(CommonArgs),
    /// Supersolution 1 − e^(−|x|²) of the exponential model and the
    /// oscillation ladder.
    ///
    /// Anchors: "Δ∞^β u = a(x)(|x|+1)^α |∇u|^m + λ|u|^γ e^u",
    /// "lim osc_{B_R} u / R = 0 implies u constant".
    Counterexample(CommonArgs),
    /// Parameter table: p₁, τ₁, p₂, τ₂, p, τ, T and admissibility per model row over
    /// a parameter sweep.
    ///
    /// Anchors: "h(s) = τ s^p", "T = (d/τ)^(1/p)", "p = min{p₁, p₂}".
    /// Sweep keys: sweep_beta, sweep_m, sweep_gamma, sweep_alpha.
    Table1(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Admit,
    Balance,
    Barrier,
    Radial,
    Grid,
    Liouville,
    Counterexample,
    Table1,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Admit => "admit",
            Verb::Balance => "balance",
            Verb::Barrier => "barrier",
            Verb::Radial => "radial",
            Verb::Grid => "grid",
            Verb::Liouville => "liouville",
            Verb::Counterexample => "counterexample",
            Verb::Table1 => "table1",
        }
    }

    /// Verbs that run on inadmissible specs.
    fn tolerates_inadmissible(self) -> bool {
        matches!(self, Verb::Admit | Verb::Table1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub verb: Verb,
    pub spec_path: PathBuf,
    pub output_dir: PathBuf,
    pub overrides: Vec<String>,
}

impl From<VerbArgs> for Command {
    fn from(args: VerbArgs) -> Self {
        let (verb, a) = match args {
            VerbArgs::Admit(a) => (Verb::Admit, a),
            VerbArgs::Balance(a) => (Verb::Balance, a),
            VerbArgs::Barrier(a) => (Verb::Barrier, a),
            VerbArgs::Radial(a) => (Verb::Radial, a),
            VerbArgs::Grid(a) => (Verb::Grid, a),
            VerbArgs::Liouville(a) => (Verb::Liouville, a),
            VerbArgs::Counterexample(a) => (Verb::Counterexample, a),
            VerbArgs::Table1(a) => (Verb::Table1, a),
        };
        Command {
            verb,
            spec_path: a.spec,
            output_dir: a.out,
            overrides: a.set,
        }
    }
}

/// Runs `cmd` and returns the process exit code. Errors go to stderr.
pub fn run(cmd: &Command) -> i32 {
    match execute(cmd) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("deadcore {}: {e}", cmd.verb.name());
            e.exit_code()
        }
    }
}

fn execute(cmd: &Command) -> Result<(), CliError> {
    let (spec, opts) = load_config(&cmd.spec_path, &cmd.overrides)?;
    let validation = validate_admissible(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    let mut report = Report::new(cmd.verb.name(), Some(spec));
    report.admissible = Some(validation.is_admissible());
    report.violations = validation.violations.clone();
    if !validation.is_admissible() && !cmd.verb.tolerates_inadmissible() {
        emit_report(&report, &cmd.output_dir)?;
        return Err(CliError::Inadmissible(validation.to_string().replace('\n', "; ")));
    }
    let outcome = dispatch(cmd.verb, &spec, &opts, &mut report);
    if let Err(e) = &outcome {
        report.insert("error", e.to_string());
        report.line(format!("error: {e}"));
    }
    emit_report(&report, &cmd.output_dir)?;
    outcome
}

fn dispatch(verb: Verb, spec: &deadcore::model::ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<(), CliError> {
    match verb {
        Verb::Admit => verbs::admit(report),
        Verb::Balance => verbs::balance(spec, opts, report)?,
        Verb::Barrier => verbs::barrier(spec, opts, report)?,
        Verb::Radial => verbs::radial(spec, opts, report)?,
        Verb::Grid => {
            if !verbs::grid(spec, opts, report)? {
                return Err(CliError::Runtime(format!(
                    "grid sweep did not reach tolerance {:e} within {} iterations",
                    opts.tolerance, opts.max_iters
                )));
            }
        }
        Verb::Liouville => verbs::liouville(spec, opts, report)?,
        Verb::Counterexample => verbs::counterexample(spec, opts, report)?,
        Verb::Table1 => verbs::table1(spec, opts, report)?,
    }
    Ok(())
}

/// Caps the global rayon pool from `DEADCORE_THREADS`, if set.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(raw) = value else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("DEADCORE_THREADS = {raw:?} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Convenience for callers that already hold paths.
pub fn command(verb: Verb, spec_path: &Path, output_dir: &Path, overrides: &[&str]) -> Command {
    Command {
        verb,
        spec_path: spec_path.to_path_buf(),
        output_dir: output_dir.to_path_buf(),
        overrides: overrides.iter().map(|s| s.to_string()).collect(),
    }
}
