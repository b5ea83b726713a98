//! `fbtrca` command-line entry point.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Bad user input detected by the command line layer itself.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Parser)]
#[command(name = "fbtrca", version, about = "Filter-bank TRCA decoding of pre-movement EEG")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory; nothing is written elsewhere.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic movement/rest dataset with ground truth.
    Synth(SynthArgs),
    /// Locate movement onsets in trajectories and reject unusable trials.
    Onset(OnsetArgs),
    /// Cross-validated accuracy of STRCA, CVT and FBTRCA.
    Bench(BenchArgs),
    /// Accuracy against K1/K2 for selectors and classifiers.
    Sweep(SweepArgs),
    /// Per-band STRCA accuracy of the M1/M2/M3 filter banks.
    CompareSettings(CompareArgs),
    /// Whole-dataset CCP features of every band as CSV.
    ExportFeatures(ExportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub channels: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Trials per class.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub fs: Option<f64>,
    #[arg(long)]
    pub snr: Option<f64>,
    #[arg(long)]
    pub band_low: Option<f64>,
    #[arg(long)]
    pub band_high: Option<f64>,
    /// binary or csv
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct OnsetArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSV with one trajectory per line.
    #[arg(long)]
    pub input: PathBuf,
    /// limb, hand or rest
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub fs: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset directory with movement/ and rest/ epoch sets.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub outer_folds: Option<usize>,
    #[arg(long)]
    pub inner_folds: Option<usize>,
    #[arg(long)]
    pub no_shuffle: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// shifted (10 × 10 grid), m1, m2 or m3
    #[arg(long)]
    pub grid: Option<String>,
    /// Bands of an m1/m2/m3 grid.
    #[arg(long)]
    pub bands: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated subset of strca1, strca2, cvt, fbtrca:lda, fbtrca:svm, fbtrca:nn.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub selector: Option<String>,
    /// type1 or type2
    #[arg(long)]
    pub arrangement: Option<String>,
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated selectors, or "all".
    #[arg(long)]
    pub selectors: Option<String>,
    /// Comma-separated subset of lda, svm, nn.
    #[arg(long)]
    pub classifiers: Option<String>,
    #[arg(long)]
    pub k1_max: Option<usize>,
    #[arg(long)]
    pub k2_max: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated subset of M1, M2, M3.
    #[arg(long)]
    pub settings: Option<String>,
    /// Bands per setting.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(fe) = cause.downcast_ref::<fbtrca::Error>() {
            return if fe.is_validation() { 2 } else { 3 };
        }
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
    }
    3
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    pool.install(|| match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Onset(a) => commands::onset(a),
        Command::Bench(a) => commands::bench(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::CompareSettings(a) => commands::compare_settings(a),
        Command::ExportFeatures(a) => commands::export_features(a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
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
