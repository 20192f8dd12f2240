//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or validation, 3 solver stability or
//! solver failure, 4 a negative `⟨δ⟩` where a theorem applies.

mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bounds::{
    compute_bounds, linear_bound_table, ratio_table, BoundsError, ProblemSpec, PUBLISHED_COLUMNS,
};
use crate::delta_verify::{run_corpus, CorpusConfig, DeltaError, DEFAULT_SHARDS, MIN_SAMPLES};
use crate::potentials::PairPotential;
use crate::solver::{ground_energy, ReducedHamiltonian, SolverConfig, SolverError};

pub use render::{format_sig6, Report, UNITS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

pub const THREADS_ENV: &str = "SALBOUND_THREADS";
pub const DEFAULT_SEED: u64 = 42;
const DEFAULT_STATES: usize = 100;
const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_LINEAR_N: [usize; 6] = [2, 3, 4, 5, 6, 10];

#[derive(Debug, Parser)]
#[command(name = "salbound", version, about = "Energy bounds for semirelativistic N-boson systems (hbar = c = 1)")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Output format [default: text]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed for Monte Carlo runs
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Oscillator basis size M [default: 40]
    #[arg(long, global = true)]
    pub basis_size: Option<usize>,
    /// Gauss-Legendre order for matrix elements [default: 200]
    #[arg(long, global = true)]
    pub quadrature_order: Option<usize>,
    /// JSON file with the same keys as the flags; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground state of beta sqrt(lambda p^2 + m^2) + gamma V(r)
    Solve(SolveArgs),
    /// Lower and upper bounds on the N-boson ground-state energy
    Bounds(BoundsArgs),
    /// Closed-form bounds for V(r) = r, m = 0
    LinearTable(LinearTableArgs),
    /// Upper/lower bound ratios for V(r) = r, m = 0
    Table1,
    /// Monte Carlo check of <delta(m, N)> >= 0 over a random state corpus
    VerifyDelta(VerifyDeltaArgs),
}

#[derive(Debug, Default, Args)]
pub struct SolveArgs {
    /// Potential: linear:<b>, coulomb:<v>, harmonic:<v>, coulomb+linear:<v>,<b>, power:<c>,<k>
    #[arg(long)]
    pub potential: Option<String>,
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct BoundsArgs {
    /// Number of particles N >= 2
    #[arg(long)]
    pub n: Option<usize>,
    /// [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub potential: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct LinearTableArgs {
    /// Comma-separated particle counts [default: 2,3,4,5,6,10]
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,
}

#[derive(Debug, Default, Args)]
pub struct VerifyDeltaArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Number of random states [default: 100]
    #[arg(long)]
    pub states: Option<usize>,
    /// Samples per state, at least 10000 [default: 100000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Independent sampler streams per state [default: 16]
    #[arg(long)]
    pub shards: Option<usize>,
    /// Also write the findings alone as JSON to this path
    #[arg(long)]
    pub findings_out: Option<PathBuf>,
}

/// Config file contents; every key is optional and mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub basis_size: Option<usize>,
    pub quadrature_order: Option<usize>,
    pub potential: Option<String>,
    pub beta: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub mass: Option<f64>,
    pub n: Option<usize>,
    pub n_values: Option<Vec<usize>>,
    pub states: Option<usize>,
    pub samples: Option<usize>,
    pub shards: Option<usize>,
    pub findings_out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::usage(format!("--config: cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("--config: {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        let code = match e {
            SolverError::InvalidHamiltonian(_) | SolverError::InvalidConfig(_) => EXIT_USAGE,
            SolverError::Unstable { .. } | SolverError::NonFinite { .. } => EXIT_SOLVER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Solver(s) => s.into(),
            BoundsError::InvalidProblem(_) | BoundsError::Unavailable { .. } => Self::usage(e.to_string()),
            BoundsError::SandwichViolation { .. } => Self {
                code: EXIT_SOLVER,
                message: e.to_string(),
            },
        }
    }
}

impl From<DeltaError> for CliError {
    fn from(e: DeltaError) -> Self {
        Self::usage(e.to_string())
    }
}

/// A rendered report and the exit code it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub out: Option<PathBuf>,
    pub code: i32,
}

struct Merged<'a> {
    file: FileConfig,
    common: &'a CommonArgs,
}

impl Merged<'_> {
    fn format(&self) -> Format {
        self.common.format.or(self.file.format).unwrap_or(Format::Text)
    }

    fn out(&self) -> Option<PathBuf> {
        self.common.out.clone().or_else(|| self.file.out.clone())
    }

    fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig::default();
        if let Some(m) = self.common.basis_size.or(self.file.basis_size) {
            cfg.basis_size = m;
        }
        if let Some(q) = self.common.quadrature_order.or(self.file.quadrature_order) {
            cfg.quadrature_order = q;
        }
        cfg.validate().map_err(|e| {
            let flag = if e.to_string().contains("basis_size") {
                "--basis-size"
            } else {
                "--quadrature-order"
            };
            CliError::usage(format!("{flag}: {e}"))
        })?;
        Ok(cfg)
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::usage(format!("missing required {flag} (flag or config key)")))
}

fn parse_potential(text: &str) -> Result<PairPotential, CliError> {
    PairPotential::from_str(text).map_err(|e| CliError::usage(format!("--potential: {e}")))
}

fn check_mass(mass: f64) -> Result<f64, CliError> {
    if mass.is_finite() && mass >= 0.0 {
        Ok(mass)
    } else {
        Err(CliError::usage(format!("--mass must be finite and >= 0, got {mass}")))
    }
}

fn check_n(n: usize) -> Result<usize, CliError> {
    if n >= 2 {
        Ok(n)
    } else {
        Err(CliError::usage(format!("--n must be >= 2, got {n}")))
    }
}

fn positive(value: f64, flag: &str) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::usage(format!("{flag} must be finite and > 0, got {value}")))
    }
}

/// Runs a parsed command and renders its report.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let merged = Merged {
        file,
        common: &cli.common,
    };
    let format = merged.format();
    let f = &merged.file;
    let (report, code) = match &cli.command {
        Command::Solve(a) => {
            let potential = parse_potential(&required(a.potential.clone().or(f.potential.clone()), "--potential")?)?;
            let beta = positive(a.beta.or(f.beta).unwrap_or(1.0), "--beta")?;
            let lambda = positive(a.lambda.or(f.lambda).unwrap_or(1.0), "--lambda")?;
            let gamma = positive(a.gamma.or(f.gamma).unwrap_or(1.0), "--gamma")?;
            let mass = check_mass(a.mass.or(f.mass).unwrap_or(0.0))?;
            let cfg = merged.solver_config()?;
            let h = ReducedHamiltonian::new(beta, lambda, gamma, mass, potential)?;
            let result = ground_energy(&h, &cfg)?;
            (Report::solve(&h, &cfg, &result), EXIT_OK)
        }
        Command::Bounds(a) => {
            let n = check_n(required(a.n.or(f.n), "--n")?)?;
            let mass = check_mass(a.mass.or(f.mass).unwrap_or(0.0))?;
            let potential = parse_potential(&required(a.potential.clone().or(f.potential.clone()), "--potential")?)?;
            let cfg = merged.solver_config()?;
            let spec = ProblemSpec::new(n, mass, potential)?;
            let set = compute_bounds(&spec, &cfg)?;
            (Report::bounds(&set, &cfg), EXIT_OK)
        }
        Command::LinearTable(a) => {
            let ns = a
                .n_values
                .clone()
                .or(f.n_values.clone())
                .unwrap_or_else(|| DEFAULT_LINEAR_N.to_vec());
            if ns.is_empty() {
                return Err(CliError::usage("--n-values must not be empty"));
            }
            let rows = ns
                .iter()
                .map(|&n| {
                    check_n(n).map_err(|_| CliError::usage(format!("--n-values: every N must be >= 2, got {n}")))?;
                    Ok(linear_bound_table(n)?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (Report::linear_table(&rows), EXIT_OK)
        }
        Command::Table1 => {
            let columns = ratio_table(&PUBLISHED_COLUMNS)?;
            (Report::table1(&columns), EXIT_OK)
        }
        Command::VerifyDelta(a) => {
            let config = CorpusConfig {
                n: check_n(required(a.n.or(f.n), "--n")?)?,
                mass: check_mass(a.mass.or(f.mass).unwrap_or(0.0))?,
                states: a.states.or(f.states).unwrap_or(DEFAULT_STATES),
                samples: a.samples.or(f.samples).unwrap_or(DEFAULT_SAMPLES),
                seed: cli.common.seed.or(f.seed).unwrap_or(DEFAULT_SEED),
                shards: a.shards.or(f.shards).unwrap_or(DEFAULT_SHARDS),
            };
            if config.states == 0 {
                return Err(CliError::usage("--states must be >= 1"));
            }
            if config.samples < MIN_SAMPLES {
                return Err(CliError::usage(format!(
                    "--samples must be >= {MIN_SAMPLES}, got {}",
                    config.samples
                )));
            }
            if config.shards == 0 {
                return Err(CliError::usage("--shards must be >= 1"));
            }
            let report = run_corpus(&config)?;
            if let Some(path) = a.findings_out.clone().or(f.findings_out.clone()) {
                let doc = render::findings_document(&report);
                write_file(&path, &doc, "--findings-out")?;
            }
            let code = if report.proven_regime_failure() {
                EXIT_VERIFICATION
            } else {
                EXIT_OK
            };
            (Report::verify_delta(&report), code)
        }
    };
    Ok(Outcome {
        output: report.render(format),
        out: merged.out(),
        code,
    })
}

fn write_file(path: &Path, text: &str, flag: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::usage(format!("{flag}: cannot write {}: {e}", path.display())))
}

/// Caps the global rayon pool from `SALBOUND_THREADS`.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(value) = value else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Full entry point: parses `args`, runs, writes output, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads(std::env::var(THREADS_ENV).ok().as_deref()) {
        eprintln!("error: {e}");
        return e.code;
    }
    match execute(&cli) {
        Ok(outcome) => {
            match &outcome.out {
                Some(path) => {
                    if let Err(e) = write_file(path, &outcome.output, "--out") {
                        eprintln!("error: {e}");
                        return e.code;
                    }
                }
                None => print!("{}", outcome.output),
            }
            if outcome.code == EXIT_VERIFICATION {
                eprintln!("error: negative <delta> beyond 3 standard errors in a theorem-covered regime");
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
