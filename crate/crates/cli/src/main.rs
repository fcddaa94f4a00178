//! `chasesim`: command-line front end for chase-escape with conversion.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or parse error,
//! 3 verification failure.

mod commands;
mod graph_args;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use chasesim_core::Geometry;

use graph_args::GraphArgs;

#[derive(Debug, Parser)]
#[command(name = "chasesim", version, about = "Simulate chase-escape with conversion")]
struct Cli {
    /// Write results to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Replica worker threads; 0 uses every available core. Output never
    /// depends on this value.
    #[arg(long, global = true, env = "CHASESIM_WORKERS", default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a graph and print it in the text graph format.
    Graph(GraphArgs),
    /// Run the process to fixation and print the outcome as JSON.
    Simulate(SimulateArgs),
    /// Print the site codes (0 white, 1 red, 2 blue by predation, 3 blue by
    /// conversion) at a given time or event count.
    Snapshot(SnapshotArgs),
    /// Estimate escape probabilities of the band experiment over a grid.
    Sweep(SweepArgs),
    /// Locate where escape-probability curves of consecutive sizes cross.
    Crossing(CrossingArgs),
    /// Statistical and coupling checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Bounds on the critical red rate, or the good-site percolation
    /// simulator.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, Args)]
struct Rates {
    /// Red spreading rate per red-white edge.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Conversion rate of each red site.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitArg {
    /// Root red, all other sites white.
    StandardRoot,
    /// Bottom row blue, the row above red (lattices only).
    Band,
    /// Root red with one extra blue vertex attached to it.
    Classical,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    rates: Rates,
    /// Random seed; fully determines the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial configuration.
    #[arg(long, value_enum, default_value_t = InitArg::StandardRoot)]
    init: InitArg,
    /// Stop after this many events.
    #[arg(long)]
    max_events: Option<u64>,
    /// Stop when red reaches the deepest level of a regular tree.
    #[arg(long)]
    stop_at_boundary: bool,
    /// Number of independent runs; more than one prints a JSON array with
    /// per-replica seeds derived from --seed.
    #[arg(long, default_value_t = 1)]
    replicas: usize,
}

#[derive(Debug, Args)]
struct SnapshotArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    rates: Rates,
    /// Random seed; fully determines the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial configuration.
    #[arg(long, value_enum, default_value_t = InitArg::StandardRoot)]
    init: InitArg,
    /// Take the snapshot at this time (default: at fixation).
    #[arg(long, conflicts_with = "events")]
    time: Option<f64>,
    /// Take the snapshot after this many events.
    #[arg(long)]
    events: Option<u64>,
    /// Roll the grid so the root sits near the centre.
    #[arg(long)]
    centered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VaryArg {
    Lambda,
    Alpha,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON file with the sweep specification; flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Which rate the grid varies.
    #[arg(long, value_enum)]
    vary: Option<VaryArg>,
    /// Value of the rate that is held fixed.
    #[arg(long)]
    fixed_value: Option<f64>,
    /// Comma-separated, strictly increasing grid values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    grid: Option<Vec<f64>>,
    /// Comma-separated lattice side lengths.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    sizes: Option<Vec<usize>>,
    /// Band runs per (size, grid value).
    #[arg(long)]
    samples_per_point: Option<u64>,
    /// Base seed of the sweep.
    #[arg(long)]
    base_seed: Option<u64>,
    /// Lattice geometry: cylinder (open top and bottom) or torus.
    #[arg(long)]
    geometry: Option<Geometry>,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct CrossingArgs {
    /// Sweep CSV produced by `sweep --csv`; `-` reads standard input.
    #[arg(value_name = "CSV")]
    input: PathBuf,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Compare the damage law of a reduction with direct simulation
    /// (two-sample chi-squared at significance 0.01).
    Oracle(OracleArgs),
    /// Sample coupled pairs and count violations of X' <= X.
    Dominance(DominanceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReductionArg {
    /// Jump-chain sampler against a long path (--n sites, default 200).
    JumpChain,
    /// Star race against S_n (--n leaves, default 5).
    Star,
    /// Birth-death reduction against K_n (--n vertices, default 6).
    Complete,
    /// Passage-time construction against a regular tree (--offspring,
    /// --depth, default binary depth 4).
    TreePassage,
    /// Per-clock reference engine against the event engine on --graph.
    PerClock,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Which reduction to test.
    #[arg(long, value_enum)]
    reduction: ReductionArg,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    rates: Rates,
    /// Samples from each side.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Minimum expected count per chi-squared bin.
    #[arg(long, default_value_t = 5)]
    min_bin: usize,
    /// Random seed; fully determines the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CouplingArg {
    /// Conversion-rate coupling on a regular tree (--offspring, --depth).
    TreeAlpha,
    /// Half-line coupling through the jump chain.
    JumpChain,
    /// Star coupling (--n >= --n-prime leaves).
    Star,
    /// Complete-graph coupling (--n >= --n-prime vertices).
    Complete,
}

#[derive(Debug, Args)]
struct DominanceArgs {
    /// Which coupling to audit.
    #[arg(long, value_enum)]
    coupling: CouplingArg,
    /// Red rate of the dominant process.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Red rate of the dominated process (default: --lambda).
    #[arg(long)]
    lambda_prime: Option<f64>,
    /// Conversion rate of the dominant process.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Conversion rate of the dominated process (default: --alpha).
    #[arg(long)]
    alpha_prime: Option<f64>,
    /// Size of the dominant star or complete graph.
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Size of the dominated star or complete graph (default: --n).
    #[arg(long)]
    n_prime: Option<usize>,
    /// Children per vertex of the tree.
    #[arg(long, default_value_t = 2)]
    offspring: usize,
    /// Depth of the tree.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Number of coupled pairs.
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    /// Random seed; fully determines the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON array of extra {"x_large", "x_small"} pairs appended to the
    /// sample before auditing.
    #[arg(long, value_name = "PATH")]
    fixture: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct BoundsArgs {
    #[command(subcommand)]
    action: Option<BoundsAction>,
    /// Maximum degree (at least 3).
    #[arg(long)]
    d: Option<usize>,
    /// Conversion rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Site-percolation threshold of the graph, in (0, 1).
    #[arg(long)]
    pc: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum BoundsAction {
    /// Sample good sites and the root's good cluster.
    Percolate(PercolateArgs),
}

#[derive(Debug, Args)]
struct PercolateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    rates: Rates,
    /// Independent draws.
    #[arg(long, default_value_t = 1)]
    replicas: usize,
    /// Random seed; fully determines the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure classes, each with its exit code.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    /// The check ran and failed; the report is still emitted.
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Verification(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
