mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pathboltz::entropy::MultiplicityMode;
use pathboltz::layered_network::ActivationKind;
use pathboltz::path_integral::SliceScheme;
use pathboltz::trainer::LossKind;
use serde::Serialize;

use manifest::{FileDigest, Inputs, RunManifest};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "pathboltz", version, about = "Path integrals, layered networks and Boltzmann machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Contract a sliced propagator, or one amplitude of it.
    Propagate(PropagateArgs),
    /// Partition function Tr exp(-beta H).
    Partition(PartitionArgs),
    /// Trotter error of the contracted chain against the exact propagator.
    Trotter(TrotterArgs),
    /// Exact or sampled Gibbs table of a restricted Boltzmann machine.
    Rbm(RbmArgs),
    /// Entropy functionals of a network's Boltzmann joint.
    Entropy(EntropyArgs),
    /// Fit a network to data.
    Train(TrainArgs),
    /// Emit or simulate the circuit of a network.
    Circuit(CircuitArgs),
}

#[derive(Args, Debug, Serialize)]
struct Evolution {
    /// Matrix CSV of the Hamiltonian.
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Inverse temperature, or time with --real-time.
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    /// Evolve in real time instead of imaginary time.
    #[arg(long)]
    real_time: bool,
}

#[derive(Args, Debug, Serialize)]
struct PropagateArgs {
    #[command(flatten)]
    evolution: Evolution,
    #[arg(long)]
    slices: usize,
    /// exact, first or strang.
    #[arg(long, default_value = "exact")]
    scheme: SliceScheme,
    /// Start index; with --end prints a single amplitude.
    #[arg(long, requires = "end")]
    start: Option<usize>,
    #[arg(long, requires = "start")]
    end: Option<usize>,
    /// Also write the chain as JSON.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PartitionArgs {
    #[command(flatten)]
    evolution: Evolution,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct TrotterArgs {
    #[command(flatten)]
    evolution: Evolution,
    #[arg(long, default_value = "first")]
    scheme: SliceScheme,
    /// Comma-separated slice counts.
    #[arg(long, value_delimiter = ',', required = true)]
    slices: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(group = clap::ArgGroup::new("method").required(true).args(["exact", "sample"]))]
struct RbmArgs {
    /// RBM parameters as JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    sample: bool,
    #[arg(long, default_value_t = 100_000)]
    sweeps: usize,
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum EntropyMode {
    Paper,
    Bethe,
    Kikuchi,
}

#[derive(Args, Debug, Serialize)]
struct EntropyArgs {
    /// Network spec JSON.
    #[arg(long)]
    network: PathBuf,
    #[arg(long, value_enum, default_value = "paper")]
    mode: EntropyMode,
    /// paper or moebius; only used by the kikuchi mode.
    #[arg(long, default_value = "paper")]
    multiplicity: MultiplicityMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum OptimizerKind {
    Adam,
    Gd,
}

#[derive(Args, Debug, Serialize)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["data", "propagator", "gibbs"]))]
struct TrainArgs {
    /// Starting network spec JSON.
    #[arg(long)]
    network: PathBuf,
    /// CSV of input-then-target rows.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Matrix CSV of a target propagator.
    #[arg(long)]
    propagator: Option<PathBuf>,
    /// Probability table JSON of a target distribution.
    #[arg(long)]
    gibbs: Option<PathBuf>,
    /// sq or kl; defaults to the kind matching the target.
    #[arg(long)]
    loss: Option<LossKind>,
    #[arg(long, value_enum, default_value = "adam")]
    opt: OptimizerKind,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "identity")]
    activation: ActivationKind,
    /// Central-difference step; analytic gradients when absent.
    #[arg(long)]
    numeric_gradient: Option<f64>,
    /// Draw fresh small weights from the seed before fitting.
    #[arg(long)]
    reinitialize: bool,
    /// Trained network JSON; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of the loss after every step.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum CircuitAction {
    Emit,
    Sim,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum CircuitFormat {
    Text,
    Json,
}

#[derive(Args, Debug, Serialize)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["network", "circuit"]))]
struct CircuitArgs {
    #[arg(value_enum)]
    action: CircuitAction,
    /// Network spec JSON.
    #[arg(long, requires = "time")]
    network: Option<PathBuf>,
    /// Previously emitted circuit, text or JSON.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    time: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: CircuitFormat,
    /// Number of shots; exact probabilities only when absent.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Propagate(_) => "propagate",
            Command::Partition(_) => "partition",
            Command::Trotter(_) => "trotter",
            Command::Rbm(_) => "rbm",
            Command::Entropy(_) => "entropy",
            Command::Train(_) => "train",
            Command::Circuit(_) => "circuit",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Rbm(a) if a.sample => Some(a.seed),
            Command::Train(a) => Some(a.seed),
            Command::Circuit(a) if a.shots.is_some() => Some(a.seed),
            _ => None,
        }
    }

    fn out(&self) -> Option<&Path> {
        match self {
            Command::Propagate(a) => a.out.as_deref(),
            Command::Partition(a) => a.out.as_deref(),
            Command::Trotter(a) => a.out.as_deref(),
            Command::Rbm(a) => a.out.as_deref(),
            Command::Entropy(a) => a.out.as_deref(),
            Command::Train(a) => a.out.as_deref(),
            Command::Circuit(a) => a.out.as_deref(),
        }
    }
}

/// Main output plus any side files, written only once everything succeeded.
pub struct Artifacts {
    pub main: String,
    pub extra: Vec<(PathBuf, String)>,
}

impl Artifacts {
    pub fn main(main: String) -> Self {
        Self { main, extra: Vec::new() }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("PATHBOLTZ_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("PATHBOLTZ_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let mut inputs = Inputs::default();
    let artifacts = match &cli.command {
        Command::Propagate(a) => commands::propagate(a, &mut inputs)?,
        Command::Partition(a) => commands::partition(a, &mut inputs)?,
        Command::Trotter(a) => commands::trotter(a, &mut inputs)?,
        Command::Rbm(a) => commands::rbm(a, &mut inputs)?,
        Command::Entropy(a) => commands::entropy(a, &mut inputs)?,
        Command::Train(a) => commands::train(a, &mut inputs)?,
        Command::Circuit(a) => commands::circuit(a, &mut inputs)?,
    };

    let mut outputs = Vec::new();
    let out = cli.command.out();
    match out {
        Some(path) => {
            write(path, &artifacts.main)?;
            outputs.push(FileDigest::of_bytes(path, artifacts.main.as_bytes()));
        }
        None => print!("{}", artifacts.main),
    }
    for (path, text) in &artifacts.extra {
        write(path, text)?;
        outputs.push(FileDigest::of_bytes(path, text.as_bytes()));
    }

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        argv: std::env::args().skip(1).collect(),
        parameters: serde_json::to_value(&cli.command)?,
        seed: cli.command.seed(),
        inputs: inputs.digests,
        outputs,
    };
    let json = manifest.to_json()?;
    match out {
        Some(path) => {
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            write(Path::new(&name), &(json + "\n"))?;
        }
        None => eprintln!("{json}"),
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<pathboltz::Error>() {
        Some(e) if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_VALIDATION) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
