mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "fermroute", version, about = "Low-depth fermion routing and encoding transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the circuit for a mode permutation under Jordan-Wigner.
    Route(RouteArgs),
    /// Synthesize a circuit between two ternary-tree encodings.
    Transform(TransformArgs),
    /// Check a circuit file against a permutation or a pair of encodings.
    Verify(VerifyArgs),
    /// Meter primitive depth over sizes and constructions; writes CSV.
    DepthScan(DepthScanArgs),
    /// Plan and emit a permutation-interleaved Trotter step.
    Trotter(TrotterArgs),
    /// Build and classify the fermionic FFT routing skeleton.
    FftSkeleton(FftArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    None,
    Symbolic,
    Statevector,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Level::None)]
    verify: Level,
    /// Write the circuit here in the text format.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RouteArgs {
    /// JSON array: entry k is the position mode k moves to.
    sigma: Option<PathBuf>,
    /// Mode count for a random permutation (or for --exhaustive).
    #[arg(long)]
    n: Option<usize>,
    /// Route and verify every permutation of --n modes.
    #[arg(long, requires = "n", conflicts_with = "sigma")]
    exhaustive: bool,
    /// Also write the staircase plan as JSON.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Source encoding: jw, parity, bk, or a tree JSON file.
    #[arg(long)]
    from: String,
    /// Target encoding: jw, parity, bk, or a tree JSON file.
    #[arg(long)]
    to: String,
    /// Mode count for named encodings.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Circuit in the text format.
    circuit: PathBuf,
    /// Permutation JSON the circuit should route.
    #[arg(long, conflicts_with_all = ["from", "to"])]
    sigma: Option<PathBuf>,
    #[arg(long, requires = "to")]
    from: Option<String>,
    #[arg(long, requires = "from")]
    to: Option<String>,
    /// Symbolic unless stated otherwise.
    #[arg(long, value_enum, default_value_t = Level::Symbolic)]
    verify: Level,
}

#[derive(Args, Debug)]
pub struct DepthScanArgs {
    /// Comma-separated mode counts.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 128, 256, 512, 1024, 2048, 4096])]
    sizes: Vec<usize>,
    /// Single size, overriding --sizes.
    #[arg(long)]
    n: Option<usize>,
    /// permutation, staircase, transform, fft-skeleton
    #[arg(long, value_delimiter = ',', default_values_t = ["permutation".to_string()])]
    constructions: Vec<String>,
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrotterArgs {
    /// Hamiltonian JSON: `{"num_modes": N, "terms": [...]}` or a bare term list.
    hamiltonian: Option<PathBuf>,
    /// Nearest-neighbour hopping on a ROWSxCOLS grid.
    #[arg(long, conflicts_with_all = ["hamiltonian", "n"])]
    grid: Option<String>,
    /// Nearest-neighbour hopping on an open chain of N modes.
    #[arg(long, conflicts_with = "hamiltonian")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    /// Also write the plan as JSON.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct FftArgs {
    /// Mode count, a power of two.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

fn configure_workers() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("FERMROUTE_WORKERS") {
        let workers: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("FERMROUTE_WORKERS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> anyhow::Result<bool> {
        configure_workers()?;
        match cli.command {
            Command::Route(a) => commands::route(a),
            Command::Transform(a) => commands::transform(a),
            Command::Verify(a) => commands::verify(a),
            Command::DepthScan(a) => commands::depth_scan(a),
            Command::Trotter(a) => commands::trotter(a),
            Command::FftSkeleton(a) => commands::fft_skeleton(a),
        }
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
