//! Command-line driver: every experiment as a seeded subcommand writing CSV
//! or JSON, plus a JSON manifest that replays the run.
//!
//! Exit codes: 0 when every check passed, 1 when a checked inequality failed,
//! 2 for invalid parameters or unreadable inputs.

mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use commands::{
    cmd_counterexample, cmd_designs, cmd_deviation, cmd_igm, cmd_sandwich, cmd_sweep,
    cmd_verify_bounds, IgmJob, Outcome,
};
pub use manifest::{Inputs, RunManifest};
pub use output::{format_float, Cell, Format, Table};

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 0x5EED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}

usage_from!(
    crate::symsum::SymError,
    crate::freeprobe::FreeError,
    crate::igm::IgmError,
    serde_json::Error
);

#[derive(Debug, Clone, Parser)]
#[command(
    name = "symagm",
    version,
    about = "Seeded experiments on symmetrized operator means"
)]
pub struct Cli {
    /// Base seed; defaults to a fixed constant (igm: the config's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 lets the runtime choose.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Manifest path; defaults to `<out>.manifest.json` when `--out` is set.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check ‖I − E_wo,d‖ ≤ (1+C)/n · d(d−1)/2 on normalized families.
    VerifyBounds(FamilyArgs),
    /// Check (1−ε)I ≤ E_wo,d ≤ (1+ε)I by minimum eigenvalues.
    Sandwich(FamilyArgs),
    /// Monte Carlo deviation of E_wo,d for i.i.d. random operators.
    Deviation(DeviationArgs),
    /// Finite-dimensional free-probability counterexample, one row per seed.
    Counterexample(CounterexampleArgs),
    /// Incremental gradient Monte Carlo error curve against the bound.
    Igm(IgmArgs),
    /// Isotropy certificates of the built-in vector generators.
    Designs(DesignsArgs),
    /// IGM bound over a grid of step sizes and step counts.
    Sweep(SweepArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyBounds(_) => "verify-bounds",
            Command::Sandwich(_) => "sandwich",
            Command::Deviation(_) => "deviation",
            Command::Counterexample(_) => "counterexample",
            Command::Igm(_) => "igm",
            Command::Designs(_) => "designs",
            Command::Sweep(_) => "sweep",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Ginibre operators normalized so that Σ A*A = nI.
    Random,
    /// Haar unitaries.
    Unitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for crate::symsum::Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => crate::symsum::Side::Left,
            SideArg::Right => crate::symsum::Side::Right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FamilyArgs {
    /// Family sizes.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub n: Vec<usize>,
    /// Operator dimensions.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub m: Vec<usize>,
    /// Degrees; pairs with d > n are skipped.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub d: Vec<usize>,
    /// Families drawn per (n, m) pair.
    #[arg(long, default_value_t = 10)]
    pub families: usize,
    #[arg(long, value_enum, default_value_t = Preset::Random)]
    pub preset: Preset,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    pub side: SideArg,
    /// Family JSON file `{"n", "m", "ops"}`; replaces the random draws.
    #[arg(long)]
    pub family: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SamplerArg {
    Identity,
    HaarUnitary,
    PerturbedIsometry,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DeviationArgs {
    #[arg(long, value_enum, default_value_t = SamplerArg::PerturbedIsometry)]
    pub sampler: SamplerArg,
    /// Perturbation size for the perturbed-isometry sampler.
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    pub d: Vec<usize>,
    /// Moment order: 1, 2 or 4.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Spectral parameter of a; at most √2.
    #[arg(long, default_value_t = 1.2)]
    pub t: f64,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IgmArgs {
    /// JSON file with the `IgmConfig` fields and an optional `generator`.
    #[arg(long)]
    pub config: PathBuf,
    /// Generator override: orbit:D, projector:D, simplex:M, cross:M, icosahedron.
    #[arg(long)]
    pub generator: Option<String>,
    /// Also run with replacement at the same seed, for comparison only.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DesignsArgs {
    /// Heisenberg-Weyl orbit dimensions (both variants).
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
    pub orbit: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub simplex: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub cross: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, default_value = "orbit:4")]
    pub generator: String,
    /// Explicit step sizes; otherwise `points` evenly inside (0, 2/μ).
    #[arg(long, value_delimiter = ',')]
    pub gammas: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// ‖x_0 − x_*‖².
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Largest step count; defaults to half the pool.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Pool multiplicity; above 1 the bound uses block_repeat.
    #[arg(long, default_value_t = 1)]
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(value_name = "MANIFEST")]
    pub source: PathBuf,
}

/// Runs one parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command.clone() {
        Command::Replay(r) => match RunManifest::read(&r.source) {
            Ok(m) => {
                let replay = Cli {
                    seed: Some(m.seed),
                    out: cli.out.or_else(|| m.outputs.first().cloned()),
                    workers: if cli.workers > 0 {
                        cli.workers
                    } else {
                        m.workers
                    },
                    format: m.format,
                    manifest: cli.manifest,
                    command: m.command,
                };
                execute(&replay, m.inputs)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        _ => execute(&cli, Inputs::default()),
    }
}

fn dispatch(
    command: &Command,
    seed: Option<u64>,
    inputs: &mut Inputs,
) -> Result<Outcome, CliError> {
    let base = seed.unwrap_or(DEFAULT_SEED);
    match command {
        Command::VerifyBounds(a) => cmd_verify_bounds(a, base, inputs),
        Command::Sandwich(a) => cmd_sandwich(a, base, inputs),
        Command::Deviation(a) => cmd_deviation(a, base),
        Command::Counterexample(a) => cmd_counterexample(a, base),
        Command::Igm(a) => cmd_igm(a, seed, inputs),
        Command::Designs(a) => cmd_designs(a, base),
        Command::Sweep(a) => cmd_sweep(a, base),
        Command::Replay(_) => Err(CliError::Usage(
            "a manifest cannot replay another replay".into(),
        )),
    }
}

fn execute(cli: &Cli, mut inputs: Inputs) -> i32 {
    let start = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = match pool.install(|| dispatch(&cli.command, cli.seed, &mut inputs)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    let text = outcome.table.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let code = if outcome.passed {
        EXIT_OK
    } else {
        EXIT_ASSERTION
    };
    let manifest_path = cli.manifest.clone().or_else(|| {
        cli.out.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = manifest_path {
        let m = RunManifest {
            subcommand: cli.command.name().to_string(),
            command: cli.command.clone(),
            seed: outcome.seed,
            format: cli.format,
            workers: cli.workers,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: cli.out.iter().cloned().collect(),
            inputs,
            duration_secs: start.elapsed().as_secs_f64(),
            exit_code: code,
        };
        if let Err(e) = m.write(&path) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    code
}

/// Parses `std::env::args` and runs; clap's own errors exit with 2.
pub fn main_from_env() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
    }
}
