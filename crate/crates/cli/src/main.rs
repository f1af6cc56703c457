//! `ellipsep` command-line tool.
//!
//! Exit codes: 0 success (or separable), 1 entangled / not exterior,
//! 2 degenerate ensemble, 3 numerical failure, 64 usage error,
//! 65 invalid input state, 74 I/O error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ellipsep", version, about = "Ellipsoidal separability classification of bipartite states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the covering ellipsoid of the canonical separable ensemble.
    Fit(FitArgs),
    /// Classify a density operator against a fitted model.
    Classify(ClassifyArgs),
    /// Write the tangent-plane pseudo-witness for an exterior state.
    Witness(WitnessArgs),
    /// Run an experiment and write CSV plus a JSON manifest.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Subsystem dimensions, e.g. 2x3.
    #[arg(long)]
    dims: String,
    /// Target norm of the ensemble vectors, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    norm: f64,
    #[arg(long, default_value_t = ellipsep_core::mvce::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Add a small ridge to the moment matrix for rank-deficient ensembles.
    #[arg(long)]
    ridge: bool,
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    state: PathBuf,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long, default_value = "witness.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Debug, Args)]
struct CommonBench {
    #[arg(long, env = "ELLIPSEP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = ellipsep_core::mvce::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Directory receiving `<experiment>.csv` and `<experiment>.manifest.json`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// False positives / negatives against the PPT ground truth per norm.
    Confusion {
        #[arg(long, default_value = "2x2")]
        dims: String,
        /// Comma-separated norms; defaults to 0.1,...,1.0.
        #[arg(long, value_delimiter = ',')]
        norms: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1000)]
        samples_per_class: usize,
        #[command(flatten)]
        common: CommonBench,
    },
    /// Horodecki states detected outside the 3x3 ellipsoid per norm.
    BeScan {
        #[arg(long, value_delimiter = ',')]
        norms: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[command(flatten)]
        common: CommonBench,
    },
    /// True PPT distance vs ellipsoid distance for random entangled states.
    DistanceCompare {
        #[arg(long, default_value = "2x2")]
        dims: String,
        #[arg(long, default_value_t = 0.5)]
        norm: f64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        common: CommonBench,
    },
    /// Bloch norm vs ellipsoid distance along the Horodecki family.
    BeCurve {
        #[arg(long, default_value_t = 0.5)]
        norm: f64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[command(flatten)]
        common: CommonBench,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(commands::EXIT_USAGE),
            };
        }
    };
    let code = match cli.command {
        Command::Fit(a) => commands::fit(&a.dims, a.norm, a.epsilon, a.ridge, &a.out),
        Command::Classify(a) => commands::classify(&a.model, &a.state),
        Command::Witness(a) => commands::witness(&a.model, &a.state, &a.out),
        Command::Bench(b) => match b.experiment {
            Experiment::Confusion { dims, norms, samples_per_class, common } => {
                commands::bench_confusion(&dims, norms, samples_per_class, common.seed, common.epsilon, &common.out_dir)
            }
            Experiment::BeScan { norms, count, common } => {
                commands::bench_be_scan(norms, count, common.epsilon, &common.out_dir)
            }
            Experiment::DistanceCompare { dims, norm, count, common } => {
                commands::bench_distance(&dims, norm, count, common.seed, common.epsilon, &common.out_dir)
            }
            Experiment::BeCurve { norm, count, common } => {
                commands::bench_be_curve(norm, count, common.epsilon, &common.out_dir)
            }
        },
    };
    ExitCode::from(code)
}
