//! `maskopt`: generate phantoms, learn sampling masks, evaluate and select
//! masks, and report generalization bounds.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 infeasible
//! configuration.

mod budget;
mod commands;
mod data;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maskopt::{DecoderConfig, DecoderKind, FamilyKind, GeneratorKind, PerformanceMeasure};

use budget::Budget;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "maskopt", version, about = "Learning-based k-space sampling mask design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write synthetic unit-norm phantoms plus a manifest.
    Phantom(PhantomArgs),
    /// Learn a mask greedily on a training directory.
    Greedy(GreedyArgs),
    /// Score masks on a test directory; writes per-image CSV.
    Evaluate(EvaluateArgs),
    /// Pick the best mask from a generator sweep or an explicit list.
    Select(SelectArgs),
    /// Print the uniform generalization bound as JSON.
    Bound(BoundArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhantomChoice {
    WaveletSparse,
    PiecewiseConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DenoiserChoice {
    Identity,
    /// Soft threshold at 3σ on the Haar detail bands.
    Wavelet,
}

#[derive(Args, Debug)]
pub struct PhantomArgs {
    #[arg(long, value_enum, default_value = "wavelet-sparse")]
    pub kind: PhantomChoice,
    /// Power of two.
    #[arg(long)]
    pub rows: usize,
    /// Power of two.
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Fraction of nonzero wavelet coefficients (wavelet-sparse only).
    #[arg(long, default_value_t = 0.05)]
    pub sparsity: f64,
    /// Rectangles per image (piecewise-constant only).
    #[arg(long, default_value_t = 3)]
    pub rectangles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Record the wall-clock time in the manifest (breaks byte-identical reruns).
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct DecoderArgs {
    /// zero_fill, bp or tv.
    #[arg(long, default_value = "bp")]
    pub decoder: DecoderKind,
    /// Regularization weight for bp and tv.
    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,
    #[arg(long, default_value_t = DecoderConfig::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Relative objective decrease that counts as converged.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl DecoderArgs {
    pub fn config(&self) -> Result<DecoderConfig, CliError> {
        let cfg = DecoderConfig::new(self.decoder)
            .with_lambda(self.lambda)
            .with_max_iters(self.max_iters)
            .with_tol(self.tol);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct WorkerArgs {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "MASKOPT_WORKERS")]
    pub workers: Option<usize>,
}

impl WorkerArgs {
    pub fn count(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

const BUDGET_HELP: &str = "Budget: N points, Nrows / Ncols full lines, or a rate in (0, 1] \
    (floored to whole lines for rows/cols families, to points otherwise)";

#[derive(Args, Debug)]
pub struct GreedyArgs {
    #[arg(long)]
    pub train_dir: PathBuf,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    /// psnr, ssim or normalized_sq.
    #[arg(long, default_value = "psnr")]
    pub metric: PerformanceMeasure,
    /// points, rows, cols or rows_and_cols.
    #[arg(long, default_value = "rows")]
    pub family: FamilyKind,
    #[arg(long, help = BUDGET_HELP)]
    pub budget: Budget,
    #[command(flatten)]
    pub workers: WorkerArgs,
    /// Add complex Gaussian noise of this standard deviation to the training set.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    /// Denoiser for the noisy regime; selecting one enables that regime.
    #[arg(long, value_enum)]
    pub denoiser: Option<DenoiserChoice>,
    /// Keep every candidate's score in the trace.
    #[arg(long)]
    pub record_candidates: bool,
    #[arg(long)]
    pub out_mask: PathBuf,
    #[arg(long)]
    pub out_trace: PathBuf,
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub test_dir: PathBuf,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    /// Metric columns to report (repeatable); defaults to all three.
    #[arg(long = "metric")]
    pub metrics: Vec<PerformanceMeasure>,
    #[arg(long)]
    pub out_csv: PathBuf,
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["generator", "mask_list"])))]
pub struct SelectArgs {
    /// low_pass, uniform_random, coherence_poly or single_image_energy.
    #[arg(long)]
    pub generator: Option<GeneratorKind>,
    /// Central regions as DXxDY, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0x0")]
    pub centers: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub degrees: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    /// Reference image for single_image_energy.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Candidate mask JSON files.
    #[arg(long, num_args = 1..)]
    pub mask_list: Vec<PathBuf>,
    #[arg(long)]
    pub train_dir: PathBuf,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[arg(long, default_value = "psnr")]
    pub metric: PerformanceMeasure,
    #[arg(long, default_value = "rows")]
    pub family: FamilyKind,
    /// Required with --generator.
    #[arg(long, help = BUDGET_HELP)]
    pub budget: Option<Budget>,
    #[command(flatten)]
    pub workers: WorkerArgs,
    /// Winning mask JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-candidate CSV report; defaults to `<out>.csv`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, default_value = "rows")]
    pub family: FamilyKind,
    /// ROWSxCOLS.
    #[arg(long)]
    pub shape: String,
    #[arg(long, help = BUDGET_HELP)]
    pub budget: Budget,
    /// Number of training signals.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Noise level; enables the noisy bound.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "wavelet")]
    pub denoiser: DenoiserChoice,
    /// Lipschitz constant of the performance measure.
    #[arg(long = "lipschitz", visible_alias = "L", default_value_t = 1.0)]
    pub lipschitz: f64,
    /// Monte-Carlo draws for the residual noise estimate.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Phantom(a) => commands::phantom(&a),
        Command::Greedy(a) => commands::greedy(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Select(a) => commands::select(&a),
        Command::Bound(a) => commands::bound(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
