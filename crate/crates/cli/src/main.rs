mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kemeny_core::ttf::{Method, PathTreePolicy};
use kemeny_core::ErrorCategory;

/// Kemeny constant estimation and maintenance on large graphs.
#[derive(Debug, Parser)]
#[command(name = "kemeny", version)]
struct Cli {
    /// Worker threads for sampling (default: all cores). KF_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact Kemeny constant from the normalized Laplacian spectrum.
    Exact {
        graph: PathBuf,
    },
    /// Spanning-tree estimate of the Kemeny constant.
    Estimate {
        graph: PathBuf,
        #[command(flatten)]
        est: EstimatorArgs,
        /// Exact value to report a relative error against.
        #[arg(long)]
        reference: Option<f64>,
        /// Writes `{sample_index, f, walk_steps}` per sample as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sample-index lifecycle.
    Index {
        #[command(subcommand)]
        action: IndexAction,
    },
    /// Applies an update stream to an index, one JSON line per update.
    UpdateReplay {
        graph: PathBuf,
        index: PathBuf,
        updates: PathBuf,
        #[arg(long, value_enum)]
        mode: ReplayMode,
        /// Writes the index after the last update.
        #[arg(long)]
        save_index: Option<PathBuf>,
        /// Writes the final graph as an edge list.
        #[arg(long)]
        save_graph: Option<PathBuf>,
    },
    /// Samples a degree-product-weighted update stream.
    GenUpdates {
        graph: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0.5)]
        insert_frac: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs the exact-identity battery on small graphs.
    OracleCheck {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 20)]
        graphs_per_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum IndexAction {
    /// Draws the initial samples and writes the index.
    Build {
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Ism)]
        mode: ModeArg,
        #[command(flatten)]
        est: EstimatorArgs,
    },
    /// Redraws every sample of an existing index on its graph.
    Rebuild {
        graph: PathBuf,
        index: PathBuf,
        /// Defaults to overwriting the input index.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct EstimatorArgs {
    /// Sample count; ignored when --eps is given.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Root label; defaults to the highest-degree node.
    #[arg(long)]
    root: Option<u64>,
    #[arg(long, value_enum, default_value_t = Tau0Arg::Bfs)]
    tau0: Tau0Arg,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Relative-error target for sample-size planning.
    #[arg(long)]
    eps: Option<f64>,
    /// Failure probability for sample-size planning.
    #[arg(long, default_value_t = 0.05)]
    pf: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Tau0Arg {
    Bfs,
    Dfs,
    Wilson,
}

impl From<Tau0Arg> for PathTreePolicy {
    fn from(t: Tau0Arg) -> Self {
        match t {
            Tau0Arg::Bfs => PathTreePolicy::Bfs,
            Tau0Arg::Dfs => PathTreePolicy::Dfs,
            Tau0Arg::Wilson => PathTreePolicy::Wilson,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Naive,
    Opt,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Naive => Method::Naive,
            MethodArg::Opt => Method::Optimized,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Bsm,
    Ism,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReplayMode {
    Bsm,
    Ism,
    Rebuild,
}

/// Exit status when `oracle-check` finds a violated identity.
const EXIT_CHECK_FAILED: u8 = 1;

fn exit_code(err: &anyhow::Error) -> u8 {
    let category = err
        .chain()
        .find_map(|e| e.downcast_ref::<kemeny_core::Error>())
        .map(|e| e.category())
        .unwrap_or(ErrorCategory::Validation);
    match category {
        ErrorCategory::Validation => 2,
        ErrorCategory::Capacity => 3,
        ErrorCategory::Convergence => 4,
        ErrorCategory::CorruptIndex => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
