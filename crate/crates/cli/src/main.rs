//! `pufkit`: simulate SRAM PUF data, enroll chips, run the token and
//! server sides of key generation, and analyze failure rates.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

pub enum CliError {
    Usage(String),
    Core(pufkit_core::Error),
    /// The server could not reproduce the token's key.
    Recovery,
}

impl From<pufkit_core::Error> for CliError {
    fn from(e: pufkit_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use pufkit_core::Error as E;
        match self {
            CliError::Recovery => 1,
            CliError::Usage(_) => 2,
            CliError::Core(E::Format { .. } | E::Protocol(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "pufkit", version, about = "SRAM PUF key generation toolkit")]
struct Cli {
    /// JSON config file; flags given explicitly take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a measurement campaign of one chip and write it to disk.
    Simulate(SimulateArgs),
    /// Build an enrollment record and its public challenge from a dataset.
    Enroll(EnrollArgs),
    /// Token side: read a response, write helper data and the local key.
    Token(TokenArgs),
    /// Server side: recover the key from helper data and a record.
    Server(ServerArgs),
    /// Choose the cheapest BCH code that meets a failure-rate target.
    Plan(PlanArgs),
    /// Min-entropy accounting for a code configuration.
    Analyze(AnalyzeArgs),
    /// Empirical key failure rate against the analytic prediction.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = pufkit_core::config::CAMPAIGN_CELLS)]
    pub cells: usize,
    #[arg(long, default_value_t = pufkit_core::config::CAMPAIGN_REPEATS)]
    pub repeats: usize,
    /// Temperatures in degrees Celsius, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub temps: Vec<i32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chip_id: Option<String>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// One raw measurement at the reference condition.
    None,
    /// Majority vote at the reference condition.
    Mv,
    /// Preselection at the reference condition.
    Presel,
    /// Preselection plus majority-voted references at `--others`.
    Mrr,
}

#[derive(Args)]
pub struct EnrollFlags {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Presel)]
    pub strategy: StrategyArg,
    #[arg(long = "ref", default_value = "25C", allow_hyphen_values = true)]
    pub reference: String,
    /// Additional reference conditions, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub others: Vec<String>,
    #[arg(long = "mv", default_value_t = pufkit_core::config::DEFAULT_MV_REPEATS)]
    pub mv_repeats: usize,
    #[arg(long = "presel", default_value_t = pufkit_core::config::DEFAULT_PRESEL_REPEATS)]
    pub presel_repeats: usize,
    /// Store a pair-output von Neumann selection with the record.
    #[arg(long)]
    pub pair_debias: bool,
}

#[derive(Args)]
pub struct EnrollArgs {
    #[command(flatten)]
    pub enroll: EnrollFlags,
    /// Record output path (server-side secret).
    #[arg(short, long)]
    pub out: PathBuf,
    /// Public challenge output path; defaults to `challenge.json` next to the record.
    #[arg(long)]
    pub challenge: Option<PathBuf>,
}

#[derive(Args)]
pub struct TokenArgs {
    #[arg(long)]
    pub challenge: Option<PathBuf>,
    /// Code as `n,k,t`.
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long)]
    pub key_bits: Option<usize>,
    /// Read the response from a stored dataset...
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub condition: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub repeat: usize,
    /// ...or power up a simulated chip sampled with this seed.
    #[arg(long, conflicts_with = "dataset")]
    pub chip_seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 25)]
    pub temp: i32,
    /// Power-up randomness for `--chip-seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Binary helper data output.
    #[arg(long)]
    pub helper: Option<PathBuf>,
    /// Optional JSON rendering of the helper data.
    #[arg(long)]
    pub helper_json: Option<PathBuf>,
    /// Local key output (hex); never sent to the server.
    #[arg(long)]
    pub key_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ServerArgs {
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Helper data, binary or JSON.
    #[arg(long)]
    pub helper: Option<PathBuf>,
    /// Temperature reported by the token; tries the nearest reference first.
    #[arg(long, allow_hyphen_values = true)]
    pub temp: Option<f64>,
}

#[derive(Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub key_bits: Option<usize>,
    /// One BER profile row (comma-separated per-reference BERs); repeatable.
    #[arg(long = "ber")]
    pub ber_rows: Vec<String>,
    /// Conditions to evaluate when planning from a dataset; defaults to all.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eval: Vec<String>,
    #[command(flatten)]
    pub enroll: EnrollFlags,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long)]
    pub key_bits: Option<usize>,
    /// Fraction of ones; measured from `--dataset` when omitted.
    #[arg(long)]
    pub bias: Option<f64>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
}

#[derive(Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub record: Option<PathBuf>,
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long)]
    pub key_bits: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flip reference bits independently with this probability...
    #[arg(long)]
    pub ber: Option<f64>,
    /// ...in bursts of this many adjacent bits.
    #[arg(long, requires = "ber")]
    pub burst: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub reference: usize,
    /// ...or power up the simulated chip sampled with this seed...
    #[arg(long, conflicts_with = "ber")]
    pub chip_seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 25)]
    pub temp: i32,
    /// ...or replay stored measurements.
    #[arg(long, conflicts_with_all = ["ber", "chip_seed"])]
    pub dataset: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub condition: Option<String>,
    /// Per-trial CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Simulate(a) => commands::simulate(a, &cfg),
        Command::Enroll(a) => commands::enroll(a, &cfg),
        Command::Token(a) => commands::token(a, &cfg),
        Command::Server(a) => commands::server(a, &cfg),
        Command::Plan(a) => commands::plan(a, &cfg),
        Command::Analyze(a) => commands::analyze(a, &cfg),
        Command::Montecarlo(a) => commands::montecarlo(a, &cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("pufkit: {m}"),
                CliError::Core(err) => eprintln!("pufkit: {err}"),
                CliError::Recovery => eprintln!("pufkit: key recovery failed"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
